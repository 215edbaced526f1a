import pytest
from hypothesis import given, settings, strategies as st

from contrait.errors import ParseError
from contrait.nodes import (
    BOOL, INT, STRING, Adapt, Binary, BoolLit, Call, Contract, IntLit, LocalDecl, MethodDecl,
    Param, Return, Signature, StrLit, TraitLit, TraitValue, Unary, Var, If, strip_spans,
)
from contrait.parser import parse_expr, parse_program, parse_trait
from contrait.printer import expr, pretty

from conftest import CORPUS


def test_precedence_mul_over_add():
    assert parse_expr("1 + 2 * 3") == Binary("+", IntLit(1), Binary("*", IntLit(2), IntLit(3)))


def test_power_is_right_associative():
    assert parse_expr("2 ** 3 ** 2") == Binary("**", IntLit(2), Binary("**", IntLit(3), IntLit(2)))


def test_unary_binds_tighter_than_power():
    e = parse_expr("-x ** 2")
    assert e == Binary("**", Unary("-", Var("x")), IntLit(2))


def test_negative_literal_folds():
    assert parse_expr("-3") == IntLit(-3)
    assert parse_expr("-(3)") == Unary("-", IntLit(3))


def test_comparison_does_not_chain():
    with pytest.raises(ParseError):
        parse_expr("1 < 2 < 3")


def test_adaptation_is_postfix():
    e = parse_expr("a + b[hide f()]")
    assert isinstance(e, Binary) and isinstance(e.rhs, Adapt)


def test_rename_with_params():
    e = parse_expr("t[rename pow(x) -> _pow(x), exp() -> _exp()]")
    (m1, m2) = e.adaptation.mappings
    assert (m1[0].name, m1[0].params, m1[1].name) == ("pow", ("x",), "_pow")
    assert m2[1].name == "_exp"


def test_method_forms():
    t = parse_trait("""class {
        @requires(x > 0) @ensures(result == x) Int id(Int x) { return x; }
        abstract Bool flag();
        String s();
    }""")
    assert not t["id"].is_abstract
    assert t["flag"].is_abstract and t["flag"].marked_abstract
    assert t["s"].is_abstract and t["s"].sig.ret == STRING
    assert t["id"].contract.requires == (Binary(">", Var("x"), IntLit(0)),)


def test_this_receiver_kept():
    e = parse_expr("this.hello()")
    assert isinstance(e, Call) and e.receiver is not None


def test_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_program("Trait t = class {\n  Int f() { return 1 }\n}", "f.trait")
    err = info.value
    assert err.span.file == "f.trait" and err.span.start_line == 2
    assert err.expected


def test_local_decl_not_allowed_as_branch():
    with pytest.raises(ParseError):
        parse_trait("class { Int f(Int x) { if (x > 0) Int y = 1; return 0; } }")


def test_string_escapes_roundtrip():
    e = parse_expr(r'"a\"b\\c"')
    assert e == StrLit('a"b\\c')
    assert parse_expr(expr(e)) == e


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.trait")), ids=lambda p: p.name)
def test_corpus_roundtrip(path):
    p = parse_program(path.read_text(), path.name)
    text = pretty(p)
    again = parse_program(text)
    assert pretty(again) == text
    assert strip_spans(parse_program(pretty(again))) == strip_spans(again)


# ---------------------------------------------------------------- property: print/parse

NAMES = st.sampled_from(["x", "y", "z"])
METHOD_NAMES = st.sampled_from(["f", "g", "h", "_k"])


def int_exprs(params):
    leaves = st.one_of(
        st.integers(-50, 50).map(IntLit),
        st.sampled_from(params).map(Var) if params else st.integers(0, 9).map(IntLit),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(["+", "-", "*", "/", "%", "**"]), children, children)
            .map(lambda t: Binary(t[0], t[1], t[2])),
            children.map(lambda e: Unary("-", e)),
            st.tuples(METHOD_NAMES, st.lists(children, max_size=2))
            .map(lambda t: Call(None, t[0], tuple(t[1]))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


def bool_exprs(params):
    ints = int_exprs(params)
    atoms = st.one_of(
        st.booleans().map(BoolLit),
        st.tuples(st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), ints, ints)
        .map(lambda t: Binary(t[0], t[1], t[2])),
    )
    return st.recursive(
        atoms,
        lambda c: st.one_of(
            st.tuples(st.sampled_from(["&&", "||"]), c, c).map(lambda t: Binary(*t)),
            c.map(lambda e: Unary("!", e)),
        ),
        max_leaves=4,
    )


@st.composite
def methods(draw, name):
    params = draw(st.lists(NAMES, max_size=2, unique=True))
    sig = Signature(name=name, params=tuple(Param(name=p, type=INT) for p in params), ret=INT)
    req = tuple(draw(st.lists(bool_exprs(params), max_size=2)))
    ens = tuple(draw(st.lists(bool_exprs(params + ["result"]), max_size=2)))
    contract = Contract(req, ens)
    if draw(st.booleans()):
        return MethodDecl(sig, contract, None, marked_abstract=draw(st.booleans()))
    body = []
    scope = list(params)
    for i in range(draw(st.integers(0, 2))):
        body.append(LocalDecl(INT, f"v{i}", draw(int_exprs(scope))))
        scope.append(f"v{i}")
    if draw(st.booleans()):
        body.append(If(draw(bool_exprs(scope)), Return(draw(int_exprs(scope)))))
    body.append(Return(draw(int_exprs(scope))))
    return MethodDecl(sig, contract, tuple(body))


@st.composite
def traits(draw):
    names = draw(st.lists(METHOD_NAMES, min_size=1, max_size=3, unique=True))
    return TraitValue.of(draw(methods(n)) for n in names)


def _canon(t: TraitValue) -> TraitValue:
    # abstract methods print with the keyword, whichever way they were written
    from dataclasses import replace

    return TraitValue.of(replace(m, marked_abstract=m.is_abstract) for m in t.sorted())


@settings(max_examples=500, deadline=None)
@given(traits())
def test_print_parse_roundtrip(t):
    text = pretty(t)
    back = parse_trait(text)
    assert strip_spans(back) == _canon(t)
    assert pretty(back) == text


@settings(max_examples=300, deadline=None)
@given(bool_exprs(["x", "y"]))
def test_expression_roundtrip(e):
    assert strip_spans(parse_expr(expr(e))) == e
