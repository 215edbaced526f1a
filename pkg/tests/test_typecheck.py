import pytest

from contrait.nodes import TraitValue
from contrait.parser import parse_program, parse_trait
from contrait.typecheck import check_program, check_trait_lit

from conftest import CORPUS


def kinds(errors):
    return [err.kind for err in errors]


def program_kinds(src):
    return kinds(check_program(parse_program(src)))


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.trait")), ids=lambda p: p.name)
def test_corpus_is_well_typed(path):
    assert check_program(parse_program(path.read_text(), path.name)) == []


def test_even_trait_checks(pow_env):
    assert check_trait_lit(pow_env.traits["even"]) == []


def test_predicate_must_be_bool():
    assert program_kinds("Trait t = class { @ensures(result + 1) Int f() { return 1; } }") == ["BadContractType"]


def test_duplicate_method():
    src = "Trait t = class { Int pow(Int x) { return x; } Int pow(Int y) { return y; } }"
    assert "DuplicateMethod" in program_kinds(src)


def test_missing_return():
    t = parse_trait("class { Int f(Bool b) { if (b) return 1; } }")
    assert kinds(check_trait_lit(t)) == ["MissingReturn"]


def test_unknown_method():
    t = parse_trait('class { String world() { return "[" + this.helper() + "]"; } }')
    assert kinds(check_trait_lit(t)) == ["UnknownName"]


def test_result_outside_postcondition():
    assert "ResultOutsidePost" in program_kinds("Trait t = class { @requires(result > 0) Int f() { return 1; } }")
    assert "ResultOutsidePost" in program_kinds("Trait t = class { Int f() { return result; } }")


def test_trait_ops_only_at_meta_level():
    src = "Trait t = class { Int f() { return 1; } }\nTrait u = class { Int g() { return t + t; } }"
    assert "UnknownName" in program_kinds(src) or "TraitOpInObjectCode" in program_kinds(src)
    assert "TraitOpInObjectCode" in program_kinds("Trait u = class { Trait g() { return g(); } }")


def test_abstract_with_body():
    assert program_kinds("Trait t = class { abstract Int f() { return 1; } }") == ["AbstractWithBody"]


def test_type_mismatch_in_body():
    assert program_kinds("Trait t = class { Int f() { return true; } }") == ["TypeMismatch"]
    assert program_kinds("Trait t = class { Int f(Int x) { return x && x; } }") == ["TypeMismatch"]


def test_string_concatenation_types():
    assert program_kinds('Trait t = class { String f() { return "a" + 1; } }') == []


def test_forward_reference_rejected():
    assert "UnknownName" in program_kinds("class C: t\nTrait t = class { }")


def test_duplicate_declaration():
    assert "DuplicateName" in program_kinds("Trait t = class { }\nTrait t = class { }")


def test_duplicate_local():
    assert "DuplicateName" in program_kinds("Trait t = class { Int f(Int x) { Int x = 1; return x; } }")


def test_meta_function_types():
    src = "Trait id(Trait t) { return t; }\nTrait a = class { }\nTrait b = id(a)\nTrait c = id(1)"
    assert program_kinds(src) == ["TypeMismatch"]


def test_error_carries_position():
    (err,) = check_program(parse_program("Trait t = class {\n  Int f() { return true; }\n}", "x.trait"))
    d = err.to_dict()
    assert (d["file"], d["line"], d["code"]) == ("x.trait", 2, "TypeMismatch")


def test_empty_trait_value():
    assert check_trait_lit(TraitValue()) == []
