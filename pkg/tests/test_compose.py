import itertools
import warnings
from dataclasses import replace

import pytest

from contrait.compose import count_ops, hide, inline_and_drop, rename, structural_shape, sum_traits
from contrait.errors import ComposeError, ComposeWarning
from contrait.nodes import PRIVATE, SigRef, TraitValue
from contrait.parser import parse_expr, parse_trait
from contrait.printer import pretty
from contrait.runtime import UNCHECKED, ClassDef, invoke
from contrait.verifier import verify_trait

from conftest import CORPUS


def ref(text):
    name, _, rest = text.partition("(")
    params = tuple(p.strip() for p in rest.rstrip(")").split(",") if p.strip())
    return SigRef(name, params)


def ren(t, *pairs):
    return rename(t, [(ref(a), ref(b)) for a, b in pairs])


def hid(t, *names):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ComposeWarning)
        return hide(t, [ref(n) for n in names])


A = parse_trait("class { Int hello() { return 1; } }")
B = parse_trait('class { abstract Int hello(); String world() { return "[" + this.hello() + "]"; } }')


def run(t, name, *args):
    return invoke(ClassDef("T", t), name, list(args), mode=UNCHECKED)


def test_sum_takes_concrete_side():
    c = sum_traits(A, B)
    assert not c["hello"].is_abstract and not c["world"].is_abstract
    assert c["hello"] == A["hello"]


def test_sum_both_concrete(pow_env):
    base = pow_env.traits["base"]
    with pytest.raises(ComposeError) as info:
        sum_traits(base, base)
    assert info.value.kind == "BothConcrete" and "exp" in info.value.methods


def test_sum_signature_mismatch():
    other = parse_trait("class { abstract String hello(); }")
    with pytest.raises(ComposeError) as info:
        sum_traits(A, other)
    assert info.value.kind == "SignatureMismatch"


def test_sum_contract_mismatch_reports_both_contracts(pow_env):
    bad = parse_trait("""class {
        @ensures(result >= 0) Int exp() { return 1; }
        @ensures(result == x**exp()) Int pow(Int x) { return x; } }""")
    renamed = ren(bad, ("exp()", "_exp()"), ("pow(x)", "_pow(x)"))
    with pytest.raises(ComposeError) as info:
        sum_traits(renamed, pow_env.traits["even"])
    err = info.value
    assert err.kind == "ContractMismatch"
    assert err.methods == ["_exp"]
    assert "result >= 0" in err.left and "result > 0" in err.right


def test_renamed_base_fits_even(pow_env):
    base, even = pow_env.traits["base"], pow_env.traits["even"]
    renamed = ren(base, ("exp()", "_exp()"), ("pow(x)", "_pow(x)"))
    assert renamed["_pow"].contract.ensures == (parse_expr("result == x**_exp()"),)
    s = sum_traits(renamed, even)
    assert all(not m.is_abstract for m in s.sorted())
    assert sorted(s.methods) == ["_exp", "_pow", "exp", "pow"]


def test_rename_identity():
    assert rename(A, []) == A


def test_rename_unknown_and_collision():
    with pytest.raises(ComposeError) as info:
        ren(A, ("nope()", "x()"))
    assert info.value.kind == "UnknownMethod"
    with pytest.raises(ComposeError) as info:
        ren(sum_traits(A, B), ("world()", "hello()"))
    assert info.value.kind == "RenameCollision"
    with pytest.raises(ComposeError) as info:
        ren(A, ("hello(x)", "h(x)"))
    assert info.value.kind == "SignatureMismatch"


SWAP = parse_trait("""class {
    @ensures(result == g(x) + 1) Int f(Int x) { return g(x) + 1; }
    @ensures(result == x * 2) Int g(Int x) { return x * 2; }
    Int h(Int x) { return f(x) - g(x); }
}""")


def test_simultaneous_swap():
    swapped = ren(SWAP, ("f(x)", "g(x)"), ("g(x)", "f(x)"))
    assert swapped["g"].contract.ensures == (parse_expr("result == f(x) + 1"),)
    for x in range(-3, 4):
        assert run(swapped, "g", x) == run(SWAP, "f", x)
        assert run(swapped, "f", x) == run(SWAP, "g", x)
        assert run(swapped, "h", x) == run(SWAP, "h", x)


def test_hello_world_flattening():
    c = ren(hid(sum_traits(A, B), "hello()"), ("world()", "hello()"))
    assert pretty(c) == 'class {\n  String hello() {\n    return "[" + 1 + "]";\n  }\n}'
    flat = ren(c, ("hello()", "world()"))
    golden = (CORPUS / "10-hello-world.flat.golden").read_text()
    assert pretty(flat) == golden.rstrip("\n")


def test_hide_unused_method_is_removed():
    t = parse_trait("class { Int m() { return 1; } Int n() { return 2; } }")
    assert hid(t, "m()") == TraitValue.of([t["n"]])


def test_hide_unknown():
    with pytest.raises(ComposeError) as info:
        hid(A, "nope()")
    assert info.value.kind == "UnknownMethod"


def test_hide_abstract_still_called():
    with pytest.raises(ComposeError) as info:
        hid(B, "hello()")
    assert info.value.kind == "HiddenAbstractStillCalled"
    assert info.value.methods == ["hello", "world"]


def test_hide_unused_abstract_warns():
    t = parse_trait("class { abstract Int m(); Int n() { return 2; } }")
    with pytest.warns(ComposeWarning):
        out = hide(t, [ref("m()")])
    assert sorted(out.methods) == ["n"]


def test_hide_moves_conjuncts_mentioning_hidden_methods(pow_env):
    base, even = pow_env.traits["base"], pow_env.traits["even"]
    s = sum_traits(ren(base, ("exp()", "_exp()"), ("pow(x)", "_pow(x)")), even)
    with pytest.warns(ComposeWarning, match="2 \\* _exp"):
        out = hide(s, [ref("_exp()"), ref("_pow(x)")])
    assert out["exp"].contract.ensures == (parse_expr("result > 0"),)
    assert out["exp"].contract.hidden == (parse_expr("result == 2 * 1"),)
    assert structural_shape(out) == structural_shape(base)


def test_hidden_conjuncts_keep_modular_proofs_valid():
    # dropping `result == h()` from g would leave f unprovable
    t = parse_trait("""class {
        @ensures(result == 3) Int h() { return 3; }
        @ensures(result == h()) Int g() { return h(); }
        @ensures(result == 4) Int f() { return g() + 1; } }""")
    assert verify_trait(t).ok
    out = hid(t, "h()")
    assert verify_trait(out).ok
    assert out["g"].contract.ensures == ()
    # the same trait with the conjunct deleted outright does not verify
    dropped = replace(out["g"], contract=replace(out["g"].contract, hidden=()))
    weakened = TraitValue.of([dropped, out["f"]])
    assert not verify_trait(weakened).ok


def test_inline_single_parameter():
    t = parse_trait("class { Int _pow(Int y) { return y; } Int pow(Int x) { return _pow(x*x); } }")
    t = TraitValue.of([replace(t["_pow"], visibility=PRIVATE), t["pow"]])
    out = inline_and_drop(t)
    assert sorted(out.methods) == ["pow"]
    assert pretty(out["pow"]) == pretty(parse_trait(
        "class { Int pow(Int x) { Int y0 = x * x; return y0; } }")["pow"])
    for x in range(-5, 6):
        assert run(out, "pow", x) == run(t, "pow", x) == x * x


def test_inline_freshens_captured_names():
    t = parse_trait("""class {
        Int k(Int x) { Int y = x + 1; return y * 2; }
        Int m(Int y) { Int x0 = 7; return k(y) + x0 + y; } }""")
    t = TraitValue.of([replace(t["k"], visibility=PRIVATE), t["m"]])
    out = inline_and_drop(t)
    assert "k" not in out
    for y in range(-4, 5):
        assert run(out, "m", y) == run(t, "m", y)


def test_short_circuit_operand_not_hoisted():
    t = parse_trait("""class {
        Int d(Int x) { Int q = 10 / x; return q; }
        Bool m(Int x) { return x != 0 && d(x) > 1; } }""")
    t = TraitValue.of([replace(t["d"], visibility=PRIVATE), t["m"]])
    out = inline_and_drop(t)
    assert "d" in out  # still called from a conditionally evaluated operand
    assert run(out, "m", 0) is False


def test_recursive_private_method_is_kept(trait):
    t = parse_trait("""class {
        Int r(Int n) { if (n <= 0) return 0; return 1 + r(n - 1); }
        Int m(Int n) { return r(n); } }""")
    t = TraitValue.of([replace(t["r"], visibility=PRIVATE), t["m"]])
    out = inline_and_drop(t)
    assert "r" in out and run(out, "m", 3) == 3


def test_multiplication_count_of_manual_pow7():
    from contrait.metaeval import eval_program
    from contrait.parser import parse_program

    env = eval_program(parse_program((CORPUS / "25-pow7.trait").read_text()))
    assert count_ops(env.traits["pow7"], "pow7") == 4


def test_sum_commutes_on_disjoint_traits():
    t1 = parse_trait("class { @ensures(result > 0) Int a() { return 1; } }")
    t2 = parse_trait("class { Int b(Int x) { return x; } abstract Int c(); }")
    assert sum_traits(t1, t2) == sum_traits(t2, t1)


def test_private_name_collision_in_sum():
    t = TraitValue.of([replace(A["hello"], visibility=PRIVATE)])
    with pytest.raises(ComposeError) as info:
        sum_traits(t, A)
    assert info.value.kind == "RenameCollision"


def test_shapes_of_generated_traits_agree(pow_env):
    from contrait.metaeval import call_meta_fn

    shapes = {structural_shape(call_meta_fn(pow_env, "generate", [k])) for k in range(1, 13)}
    assert shapes == {structural_shape(pow_env.traits["base"])}
