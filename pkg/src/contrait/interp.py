"""Expression and statement evaluation shared by the runtime, the verifier
and the compile-time evaluator. Subclasses decide what a call means."""

from __future__ import annotations

from typing import Any

from .errors import EvalFault
from .nodes import (
    Adapt, Binary, BoolLit, Call, Expr, If, IntLit, LocalDecl, New, Return,
    StrLit, This, TraitLit, TraitValue, Unary, Var,
)

# `x ** n` beyond this exponent is refused instead of exhausting memory.
MAX_EXPONENT = 100_000


def is_int(v) -> bool:
    return type(v) is int


def int_div(a: int, b: int, span=None) -> int:
    if b == 0:
        raise EvalFault("division by zero", span, kind="DivideByZero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int, span=None) -> int:
    if b == 0:
        raise EvalFault("modulo by zero", span, kind="DivideByZero")
    return a - b * int_div(a, b)


def int_pow(a: int, b: int, span=None) -> int:
    if b < 0:
        raise EvalFault(f"negative exponent {b}", span, kind="NegativeExponent")
    if b > MAX_EXPONENT and abs(a) > 1:
        raise EvalFault(f"exponent {b} too large", span, kind="ExponentTooLarge")
    return a ** b


def to_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


class Evaluator:
    """Strict left-to-right evaluation with short-circuit `&&`/`||`."""

    def eval(self, e: Expr, env: dict) -> Any:
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, StrLit):
            return e.value
        if isinstance(e, Var):
            return self.lookup(e, env)
        if isinstance(e, This):
            return env.get("this")
        if isinstance(e, Unary):
            v = self.eval(e.operand, env)
            if e.op == "-":
                if not is_int(v):
                    raise EvalFault("unary '-' needs an Int", e.span)
                return -v
            if not isinstance(v, bool):
                raise EvalFault("'!' needs a Bool", e.span)
            return not v
        if isinstance(e, Binary):
            if e.op in ("&&", "||"):
                lhs = self.eval(e.lhs, env)
                if not isinstance(lhs, bool):
                    raise EvalFault(f"'{e.op}' needs Bool operands", e.span)
                if (e.op == "&&") != lhs:
                    return lhs
                rhs = self.eval(e.rhs, env)
                if not isinstance(rhs, bool):
                    raise EvalFault(f"'{e.op}' needs Bool operands", e.span)
                return rhs
            lhs = self.eval(e.lhs, env)
            rhs = self.eval(e.rhs, env)
            return self.binary(e, lhs, rhs)
        if isinstance(e, Call):
            receiver = None if e.receiver is None else self.eval(e.receiver, env)
            args = [self.eval(a, env) for a in e.args]
            return self.call(e, receiver, args, env)
        if isinstance(e, New):
            return self.new(e, env)
        if isinstance(e, TraitLit):
            return self.trait_literal(e, env)
        if isinstance(e, Adapt):
            return self.adapt(e, self.eval(e.target, env), env)
        raise EvalFault(f"cannot evaluate {type(e).__name__}", getattr(e, "span", None))

    def lookup(self, e: Var, env: dict):
        try:
            return env[e.name]
        except KeyError:
            raise EvalFault(f"unbound name '{e.name}'", e.span) from None

    def binary(self, e: Binary, lhs, rhs):
        op = e.op
        if op == "+":
            if is_int(lhs) and is_int(rhs):
                return lhs + rhs
            if isinstance(lhs, str) and isinstance(rhs, (str, int)) and not isinstance(rhs, bool):
                return lhs + to_text(rhs)
            if isinstance(rhs, str) and is_int(lhs):
                return to_text(lhs) + rhs
            if isinstance(lhs, TraitValue) and isinstance(rhs, TraitValue):
                return self.trait_sum(e, lhs, rhs)
            raise EvalFault("bad operands for '+'", e.span)
        if op in ("==", "!="):
            same = type(lhs) is type(rhs) and lhs == rhs
            return same if op == "==" else not same
        if not (is_int(lhs) and is_int(rhs)):
            raise EvalFault(f"'{op}' needs Int operands", e.span)
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            return int_div(lhs, rhs, e.span)
        if op == "%":
            return int_mod(lhs, rhs, e.span)
        if op == "**":
            return int_pow(lhs, rhs, e.span)
        if op == "<":
            return lhs < rhs
        if op == "<=":
            return lhs <= rhs
        if op == ">":
            return lhs > rhs
        if op == ">=":
            return lhs >= rhs
        raise EvalFault(f"unknown operator {op}", e.span)

    def exec_body(self, body, env: dict):
        for s in body:
            done, value = self.exec_stmt(s, env)
            if done:
                return value
        raise EvalFault("control reached the end of a body without return")

    def exec_stmt(self, s, env: dict):
        if isinstance(s, LocalDecl):
            env[s.name] = self.eval(s.init, env)
            return False, None
        if isinstance(s, Return):
            return True, self.eval(s.value, env)
        if isinstance(s, If):
            cond = self.eval(s.cond, env)
            if not isinstance(cond, bool):
                raise EvalFault("if condition must be Bool", s.span)
            if cond:
                return self.exec_stmt(s.then, env)
            return False, None
        raise EvalFault(f"unknown statement {type(s).__name__}")

    # -- hooks

    def call(self, e: Call, receiver, args, env):
        raise EvalFault(f"calls are not allowed here ({e.name})", e.span)

    def new(self, e: New, env):
        raise EvalFault("'new' is not allowed here", e.span)

    def trait_literal(self, e: TraitLit, env):
        raise EvalFault("trait literals are only evaluated at compile time", e.span)

    def adapt(self, e: Adapt, target, env):
        raise EvalFault("trait adaptation is only evaluated at compile time", e.span)

    def trait_sum(self, e: Binary, lhs, rhs):
        raise EvalFault("trait sum is only evaluated at compile time", e.span)
