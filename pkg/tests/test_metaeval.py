import pytest

from contrait.compose import count_ops
from contrait.errors import ContractViolation, EvalFault, MetaError
from contrait.metaeval import call_meta_fn, eval_program, materialize_class
from contrait.parser import parse_program
from contrait.runtime import invoke

from conftest import FIXTURES, POW, program


def compose(env, a, b):
    return call_meta_fn(env, "compose", [a, b])


def test_pow7_materialized(pow_env):
    assert {"Pow1", "Pow7", "Pow12"} <= set(pow_env.classes)
    assert not pow_env.classes["Pow7"].body["pow"].is_abstract


def test_generate_seven_unfolds(pow_env):
    t = pow_env.traits
    base, even, odd = t["base"], t["even"], t["odd"]
    expected = compose(pow_env, compose(pow_env, compose(pow_env, compose(pow_env, base, even), odd), even), odd)
    assert call_meta_fn(pow_env, "generate", [7]) == expected


def test_generate_one_is_base(pow_env):
    assert call_meta_fn(pow_env, "generate", [1]) == pow_env.traits["base"]


def test_pow3_by_two_compose_steps(pow_env):
    t = pow_env.traits
    pow3 = compose(pow_env, compose(pow_env, t["base"], t["even"]), t["odd"])
    cls = materialize_class("Pow3", pow3)
    assert [invoke(cls, "pow", [x]) for x in range(-3, 4)] == [x ** 3 for x in range(-3, 4)]


def test_generate_call_counts(pow_env):
    before = pow_env.calls.copy()
    call_meta_fn(pow_env, "generate", [7])
    delta = pow_env.calls - before
    # 7 -> 6 -> 3 -> 2 -> 1
    assert delta["generate"] == 5 and delta["compose"] == 4


def test_literal_only_program():
    env = eval_program(parse_program("Trait a = class { Int f() { return 1; } }"))
    assert list(env.traits) == ["a"] and env.classes == {}


def test_generate_zero_violates_requires():
    with pytest.raises(MetaError) as info:
        eval_program(program(POW, FIXTURES / "generate-zero.trait"))
    err = info.value
    assert isinstance(err.cause, ContractViolation)
    assert err.cause.kind == "Requires" and err.cause.predicate == "exp > 0"
    assert err.stack_text() == ["generate(0)"]


def test_stack_names_the_failing_chain():
    src = POW.read_text() + "\nTrait baseBad = class { @ensures(result >= 0) Int exp() { return 1; }" \
        " @ensures(result == x**exp()) Int pow(Int x) { return x; } }\n" \
        "Trait gen(Int n) { if (n == 1) return baseBad; return compose(gen(n - 1), odd); }\nclass Q: gen(3)\n"
    with pytest.raises(MetaError) as info:
        eval_program(parse_program(src))
    assert [f.split("(")[0] for f in info.value.stack_text()] == ["gen", "gen", "compose"]
    assert info.value.cause.kind == "ContractMismatch"


def test_abstract_methods_block_materialization(pow_env):
    with pytest.raises(MetaError) as info:
        materialize_class("E", pow_env.traits["even"])
    assert "_exp" in str(info.value) and "_pow" in str(info.value)
    assert isinstance(info.value.cause, EvalFault)


def test_pow12_against_oracle(pow_env):
    cls = pow_env.classes["Pow12"]
    assert [invoke(cls, "pow", [x]) for x in range(-5, 6)] == [x ** 12 for x in range(-5, 6)]


def test_meta_recursion_depth_limit():
    src = "Trait a = class { }\nTrait loop(Int n) { return loop(n + 1); }\nclass L: loop(0)\n"
    with pytest.raises(MetaError) as info:
        eval_program(parse_program(src), depth_limit=200)
    assert info.value.cause.kind == "DepthLimit"


def test_generate_large_exponent(pow_env):
    t = call_meta_fn(pow_env, "generate", [1000])
    assert count_ops(t, "pow") <= 2 * 9
