"""Compile-time evaluation of trait/class initializers and meta functions.

Trait values are first-class at this level: `+` sums them and the `[rename]`
and `[hide]` adaptations call into :mod:`contrait.compose`. Any failure that
escapes becomes a :class:`MetaError` carrying the chain of meta calls that
was active when it was raised.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Union

from . import compose
from .deep import run_deep
from .errors import ContraitError, ContractViolation, DepthLimit, EvalFault, MetaError
from .interp import Evaluator
from .nodes import (
    Adapt, Binary, Call, ClassDecl, FunDecl, Hide, Program, Rename, TraitDecl,
    TraitLit, TraitValue, Var,
)
from .printer import expr as print_expr
from .runtime import ClassDef

DEFAULT_META_DEPTH = 10_000

Value = Union[int, bool, str, TraitValue]


@dataclass
class MetaEnv:
    bindings: dict = field(default_factory=dict)  # name -> TraitValue | ClassDef
    functions: dict = field(default_factory=dict)  # name -> FunDecl
    calls: Counter = field(default_factory=Counter)  # meta calls per function

    @property
    def classes(self) -> dict[str, ClassDef]:
        return {n: v for n, v in self.bindings.items() if isinstance(v, ClassDef)}

    @property
    def traits(self) -> dict[str, TraitValue]:
        return {n: v for n, v in self.bindings.items() if isinstance(v, TraitValue)}


class MetaEvaluator(Evaluator):
    def __init__(self, env: MetaEnv, depth_limit: int = DEFAULT_META_DEPTH):
        self.env = env
        self.depth_limit = depth_limit
        self.stack: list[tuple[str, tuple]] = []

    def lookup(self, e: Var, env: dict):
        if e.name in env:
            return env[e.name]
        value = self.env.bindings.get(e.name)
        if isinstance(value, TraitValue):
            return value
        raise EvalFault(f"unknown trait '{e.name}'", e.span, kind="UnknownName")

    def trait_literal(self, e: TraitLit, env):
        return compose.validate(TraitValue.of(e.methods))

    def trait_sum(self, e: Binary, lhs, rhs):
        return compose.sum_traits(lhs, rhs)

    def adapt(self, e: Adapt, target, env):
        if not isinstance(target, TraitValue):
            raise EvalFault("only traits can be adapted", e.span)
        a = e.adaptation
        if isinstance(a, Rename):
            return compose.rename(target, a.mappings)
        if isinstance(a, Hide):
            return compose.hide(target, a.refs)
        raise EvalFault(f"unknown adaptation {a!r}", e.span)

    def call(self, e: Call, receiver, args, env):
        f = self.env.functions.get(e.name)
        if f is None or e.receiver is not None:
            raise EvalFault(f"unknown function '{e.name}'", e.span, kind="UnknownName")
        return self.call_fn(f, args)

    def call_fn(self, f: FunDecl, args) -> Value:
        if len(args) != len(f.sig.params):
            raise EvalFault(f"{f.name} expects {len(f.sig.params)} arguments", f.span)
        self.stack.append((f.name, tuple(args)))
        self.env.calls[f.name] += 1
        try:
            if len(self.stack) > self.depth_limit:
                raise DepthLimit(self.depth_limit, f.span)
            params = dict(zip(f.sig.param_names, args))
            for pred in f.contract.requires:
                self._check(f, pred, dict(params), "Requires")
            result = self.exec_body(f.body, dict(params))
            for pred in f.contract.ensures + f.contract.hidden:
                self._check(f, pred, {**params, "result": result}, "Ensures")
            return result
        except MetaError:
            raise
        except RecursionError:
            raise MetaError(DepthLimit(self.depth_limit, f.span), list(self.stack)) from None
        except ContraitError as exc:
            raise MetaError(exc, list(self.stack)) from exc
        finally:
            self.stack.pop()

    def _check(self, f: FunDecl, pred, env: dict, kind: str):
        if self.eval(pred, dict(env)) is not True:
            raise ContractViolation(f.name, kind, print_expr(pred), env, span=pred.span)

    def toplevel(self, e) -> Value:
        try:
            return self.eval(e, {})
        except MetaError:
            raise
        except ContraitError as exc:
            raise MetaError(exc, []) from exc


def materialize_class(name: str, t: TraitValue) -> ClassDef:
    abstract = [m.name for m in t.sorted() if m.is_abstract]
    if abstract:
        raise MetaError(EvalFault(
            f"class {name} still has abstract methods: {', '.join(abstract)}",
            kind="AbstractMethodsRemain",
        ))
    return ClassDef(name, compose.validate(t))


def _eval_program(p: Program, depth_limit: int) -> MetaEnv:
    env = MetaEnv()
    ev = MetaEvaluator(env, depth_limit)
    for d in p.decls:
        if isinstance(d, FunDecl):
            env.functions[d.name] = d
        elif isinstance(d, TraitDecl):
            value = ev.toplevel(d.init)
            if not isinstance(value, TraitValue):
                raise MetaError(EvalFault(f"{d.name} is not a trait", d.span))
            env.bindings[d.name] = value
        elif isinstance(d, ClassDecl):
            value = ev.toplevel(d.init)
            if not isinstance(value, TraitValue):
                raise MetaError(EvalFault(f"{d.name} is not a trait", d.span))
            env.bindings[d.name] = materialize_class(d.name, value)
    return env


def eval_program(p: Program, depth_limit: int = DEFAULT_META_DEPTH) -> MetaEnv:
    """Evaluate declarations in textual order. The program must typecheck."""
    return run_deep(_eval_program, p, depth_limit)


def call_meta_fn(env: MetaEnv, name: str, args, depth_limit: int = DEFAULT_META_DEPTH) -> Value:
    """Invoke a meta function of an evaluated program, e.g. `generate(7)`."""
    ev = MetaEvaluator(env, depth_limit)
    return run_deep(ev.call_fn, env.functions[name], list(args))
