"""Bounded modular verification of traits.

Each concrete method is executed on every parameter tuple drawn from small
domains. Inside the body, every call to a sibling method (abstract or not,
including recursive self-calls) is replaced by that method's contract: the
callee's precondition is asserted on the actual arguments and its return
value is taken from its postcondition. A postcondition of the form
``result == E`` gives the value directly; otherwise every value of the havoc
domain satisfying the postcondition is tried, one scenario each. Within a
scenario a call with the same arguments always yields the same value.

Contract predicates are evaluated with ordinary semantics: a sibling call
inside a predicate runs the callee's body when it has one and is modelled by
its contract when it is abstract.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Optional

from .deep import run_deep
from .errors import DepthLimit, EvalFault, show_value
from .interp import Evaluator
from .nodes import (
    BOOL, INT, STRING, Binary, Call, ClassDecl, Expr, FunDecl, MethodDecl,
    Program, TraitDecl, TraitLit, TraitValue, Var, body_exprs, children, walk,
)
from .printer import expr as print_expr

PASS = "Pass"
FAIL = "Fail"
VACUOUS = "Vacuous"
INCONCLUSIVE = "Inconclusive"

STRING_DOMAIN = ("", "a")


@dataclass(frozen=True)
class VerifyConfig:
    int_domain: tuple[int, int] = (-4, 4)
    havoc_domain: tuple[int, int] = (-16, 16)
    max_scenarios: int = 512
    vacuity_warnings: bool = True
    depth_limit: int = 500  # nested concrete calls while evaluating predicates

    def __post_init__(self):
        for lo, hi in (self.int_domain, self.havoc_domain):
            if lo > hi:
                raise ValueError(f"empty domain {lo}..{hi}")
        if self.max_scenarios < 1:
            raise ValueError("max_scenarios must be at least 1")

    def values(self, ty, havoc: bool = False):
        if ty == INT:
            lo, hi = self.havoc_domain if havoc else self.int_domain
            return range(lo, hi + 1)
        if ty == BOOL:
            return (False, True)
        if ty == STRING:
            return STRING_DOMAIN
        raise ValueError(f"cannot enumerate values of type {ty}")


@dataclass(frozen=True)
class TraceEntry:
    callee: str
    args: tuple
    value: Any
    source: str  # "ensures" (functional), "havoc", or "body"

    def __str__(self) -> str:
        args = ", ".join(show_value(a) for a in self.args)
        return f"{self.callee}({args}) = {show_value(self.value)} [{self.source}]"


@dataclass
class Counterexample:
    method: str
    kind: str  # "Ensures" | "CalleeRequires" | "RuntimeFault"
    inputs: dict
    predicate: Optional[str] = None
    callee: Optional[str] = None
    bindings: dict = field(default_factory=dict)
    locals: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    choices: tuple = ()
    message: str = ""

    def describe(self) -> str:
        inputs = ", ".join(f"{k}={show_value(v)}" for k, v in self.inputs.items())
        what = {
            "Ensures": f"postcondition `{self.predicate}` fails",
            "CalleeRequires": f"precondition `{self.predicate}` of {self.callee} fails",
            "RuntimeFault": f"evaluation fails: {self.message}",
        }[self.kind]
        lines = [f"{self.method}({inputs}): {what}"]
        if self.bindings:
            label = f"{self.callee} called with" if self.callee else "bindings"
            lines.append(f"  {label}: " + ", ".join(f"{k}={show_value(v)}" for k, v in self.bindings.items()))
        lines += [f"  call {t}" for t in self.trace]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": {k: show_value(v) for k, v in self.inputs.items()},
            "predicate": self.predicate,
            "callee": self.callee,
            "bindings": {k: show_value(v) for k, v in self.bindings.items()},
            "trace": [str(t) for t in self.trace],
            "choices": list(self.choices),
            "message": self.message,
        }


@dataclass
class MethodReport:
    method: str
    status: str
    counterexample: Optional[Counterexample] = None
    inputs_checked: int = 0
    scenarios: int = 0
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "inputs": self.inputs_checked,
            "scenarios": self.scenarios,
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
            "warnings": list(self.warnings),
        }


@dataclass
class VerifyReport:
    methods: dict = field(default_factory=dict)  # name -> MethodReport

    @property
    def ok(self) -> bool:
        return all(r.status == PASS for r in self.methods.values())

    def status(self, name: str) -> str:
        return self.methods[name].status

    def failures(self) -> list[MethodReport]:
        return [r for r in self.methods.values() if r.status == FAIL]

    def to_dict(self) -> dict:
        return {name: self.methods[name].to_dict() for name in sorted(self.methods)}


# ---------------------------------------------------------------- scenarios

class _Vacuous(Exception):
    pass


class _Violation(Exception):
    def __init__(self, kind: str, predicate=None, callee=None, bindings=None, message=""):
        super().__init__(message or kind)
        self.kind = kind
        self.predicate = predicate
        self.callee = callee
        self.bindings = bindings or {}
        self.message = message


class _Chooser:
    """Replays a prefix of choices and records the rest (first option)."""

    def __init__(self, prefix=()):
        self.prefix = list(prefix)
        self.taken: list[int] = []
        self.sizes: list[int] = []

    def choose(self, n: int) -> int:
        k = len(self.taken)
        i = self.prefix[k] if k < len(self.prefix) else 0
        if i >= n:
            i = n - 1
        self.taken.append(i)
        self.sizes.append(n)
        return i

    def next_prefix(self) -> Optional[list[int]]:
        for k in range(len(self.taken) - 1, -1, -1):
            if self.taken[k] + 1 < self.sizes[k]:
                return self.taken[:k] + [self.taken[k] + 1]
        return None


def functional_value(conj: Expr) -> Optional[Expr]:
    """E when `conj` reads `result == E` (either side) and E avoids `result`."""
    if not (isinstance(conj, Binary) and conj.op == "=="):
        return None
    for side, other in ((conj.lhs, conj.rhs), (conj.rhs, conj.lhs)):
        if isinstance(side, Var) and side.name == "result":
            if not any(isinstance(n, Var) and n.name == "result" for n in walk(other)):
                return other
    return None


class _Run:
    """State of one scenario: memoised call results and havoc choices."""

    def __init__(self, trait: TraitValue, cfg: VerifyConfig, chooser: _Chooser):
        self.trait = trait
        self.cfg = cfg
        self.chooser = chooser
        self.memo: dict = {}
        self.trace: list[TraceEntry] = []
        self.body = _BodyEval(self)
        self.pred = _PredEval(self)
        self.vacuous_calls = 0

    def predicate(self, e: Expr, env: dict):
        return self.pred.eval(e, dict(env))

    def model(self, callee: MethodDecl, args: list):
        """Return value of a call as described by the callee's postcondition."""
        key = (callee.name, tuple(args))
        if key in self.memo:
            return self.memo[key]
        env = dict(zip(callee.sig.param_names, args))
        conjuncts = callee.contract.all_ensures()
        for conj in conjuncts:
            e = functional_value(conj)
            if e is None:
                continue
            try:
                value = self.predicate(e, env)
            except EvalFault as exc:
                raise _Violation("RuntimeFault", print_expr(conj), callee.name, env,
                                 f"contract of {callee.name}: {exc}") from None
            if not self._holds(conjuncts, env, value, callee):
                self.vacuous_calls += 1
                raise _Vacuous()
            return self._remember(key, value, "ensures")
        candidates = [v for v in self.cfg.values(callee.sig.ret, havoc=True)
                      if self._holds(conjuncts, env, v, callee)]
        if not candidates:
            self.vacuous_calls += 1
            raise _Vacuous()
        value = candidates[self.chooser.choose(len(candidates))]
        return self._remember(key, value, "havoc")

    def _holds(self, conjuncts, env, value, callee) -> bool:
        post = {**env, "result": value}
        for c in conjuncts:
            try:
                if self.predicate(c, post) is not True:
                    return False
            except EvalFault as exc:
                raise _Violation("RuntimeFault", print_expr(c), callee.name, post,
                                 f"contract of {callee.name}: {exc}") from None
        return True

    def _remember(self, key, value, source):
        self.memo[key] = value
        self.trace.append(TraceEntry(key[0], key[1], value, source))
        return value


class _BodyEval(Evaluator):
    """Executes the body under verification; calls follow contracts."""

    def __init__(self, run: _Run):
        self.run = run

    def call(self, e: Call, receiver, args, env):
        callee = self.run.trait.methods.get(e.name)
        if callee is None:
            raise EvalFault(f"unknown method {e.name}", e.span)
        pre_env = dict(zip(callee.sig.param_names, args))
        for pred in callee.contract.requires:
            try:
                ok = self.run.predicate(pred, pre_env)
            except EvalFault as exc:
                raise _Violation("RuntimeFault", print_expr(pred), callee.name, pre_env,
                                 f"precondition of {callee.name}: {exc}") from None
            if ok is not True:
                raise _Violation("CalleeRequires", predicate=print_expr(pred),
                                 callee=callee.name, bindings=pre_env)
        return self.run.model(callee, args)


class _PredEval(Evaluator):
    """Ordinary evaluation for predicates: concrete callees run their body,
    abstract ones are modelled by their postcondition."""

    def __init__(self, run: _Run):
        self.run = run
        self.depth = 0

    def call(self, e: Call, receiver, args, env):
        run = self.run
        callee = run.trait.methods.get(e.name)
        if callee is None:
            raise EvalFault(f"unknown method {e.name}", e.span)
        key = (callee.name, tuple(args))
        if key in run.memo:
            return run.memo[key]
        if callee.is_abstract:
            return run.model(callee, args)
        self.depth += 1
        try:
            if self.depth > run.cfg.depth_limit:
                raise DepthLimit(run.cfg.depth_limit, e.span)
            value = self.exec_body(callee.body, dict(zip(callee.sig.param_names, args)))
        except RecursionError:
            raise DepthLimit(run.cfg.depth_limit, e.span) from None
        finally:
            self.depth -= 1
        return run._remember(key, value, "body")


SKIPPED, OK, VACUOUS_PATH = "skipped", "ok", "vacuous"


def _run_scenario(t: TraitValue, m: MethodDecl, inputs: dict, cfg: VerifyConfig, chooser: _Chooser):
    """Returns SKIPPED / OK / VACUOUS_PATH, or a Counterexample."""
    run = _Run(t, cfg, chooser)

    def counterexample(v: _Violation, env=None, result=None, has_result=False):
        bindings = dict(inputs)
        if v.kind == "CalleeRequires" or v.callee:
            bindings = dict(v.bindings)
        elif has_result:
            bindings["result"] = result
        local_vars = {k: val for k, val in (env or {}).items() if k not in inputs}
        return Counterexample(
            m.name, v.kind, dict(inputs), v.predicate, v.callee, bindings, local_vars,
            list(run.trace), tuple(chooser.taken), v.message,
        )

    try:
        for pred in m.contract.requires:
            if run.predicate(pred, inputs) is not True:
                return SKIPPED
    except EvalFault:
        return SKIPPED
    except _Vacuous:
        return VACUOUS_PATH
    except _Violation:
        return SKIPPED
    env = dict(inputs)
    try:
        result = run.body.exec_body(m.body, env)
    except _Vacuous:
        return VACUOUS_PATH
    except _Violation as v:
        return counterexample(v, env)
    except RecursionError:
        return counterexample(_Violation("RuntimeFault", message="recursion too deep"), env)
    except EvalFault as exc:
        return counterexample(_Violation("RuntimeFault", message=str(exc)), env)
    post = {**inputs, "result": result}
    for pred in m.contract.all_ensures():
        try:
            ok = run.predicate(pred, post)
        except _Vacuous:
            return VACUOUS_PATH
        except _Violation as v:
            return counterexample(v, env, result, True)
        except EvalFault as exc:
            return counterexample(_Violation("RuntimeFault", print_expr(pred), message=str(exc)),
                                  env, result, True)
        if ok is not True:
            return counterexample(_Violation("Ensures", print_expr(pred)), env, result, True)
    return OK


def input_space(m: MethodDecl, cfg: VerifyConfig):
    names = m.sig.param_names
    for combo in itertools.product(*(cfg.values(p.type) for p in m.sig.params)):
        yield dict(zip(names, combo))


def verify_method(t: TraitValue, m: MethodDecl, cfg: VerifyConfig) -> MethodReport:
    report = MethodReport(m.name, PASS)
    satisfied = 0
    inconclusive = False
    vacuous_paths = 0
    for inputs in input_space(m, cfg):
        report.inputs_checked += 1
        prefix: Optional[list[int]] = []
        count = 0
        any_entry = False
        while prefix is not None:
            if count >= cfg.max_scenarios:
                inconclusive = True
                break
            chooser = _Chooser(prefix)
            outcome = _run_scenario(t, m, inputs, cfg, chooser)
            count += 1
            report.scenarios += 1
            if isinstance(outcome, Counterexample):
                report.status = FAIL
                report.counterexample = outcome
                return report
            if outcome != SKIPPED:
                any_entry = True
            if outcome == VACUOUS_PATH:
                vacuous_paths += 1
            prefix = chooser.next_prefix()
        satisfied += any_entry
    if vacuous_paths and cfg.vacuity_warnings:
        report.warnings.append(f"{vacuous_paths} call path(s) with unsatisfiable callee postconditions skipped")
    if satisfied == 0:
        report.status = VACUOUS
        report.warnings.append("no input satisfies the precondition")
    elif inconclusive:
        report.status = INCONCLUSIVE
        report.warnings.append(f"scenario cap {cfg.max_scenarios} reached")
    return report


def _verify_trait(t: TraitValue, cfg: VerifyConfig) -> VerifyReport:
    report = VerifyReport()
    for m in t.sorted():
        if not m.is_abstract:
            report.methods[m.name] = verify_method(t, m, cfg)
    return report


def verify_trait(t: TraitValue, cfg: Optional[VerifyConfig] = None) -> VerifyReport:
    """Check every concrete method of `t`; findings are in the report."""
    return run_deep(_verify_trait, t, cfg or VerifyConfig())


def replay(t: TraitValue, cex: Counterexample, cfg: Optional[VerifyConfig] = None):
    """Re-run the scenario a counterexample was found in."""
    cfg = cfg or VerifyConfig()
    return run_deep(_run_scenario, t, t[cex.method], dict(cex.inputs), cfg, _Chooser(cex.choices))


# ---------------------------------------------------------------- programs

def _literals_in(e: Expr):
    if isinstance(e, TraitLit):
        yield e
        return
    for c in children(e):
        yield from _literals_in(c)


def source_literals(p: Program) -> dict[str, TraitValue]:
    """Trait literals written in the program text, keyed by a readable name.
    A literal that is a whole trait declaration takes the declaration's name;
    others are named `<decl>#<k>`."""
    out = {}
    for d in p.decls:
        if isinstance(d, TraitDecl) and isinstance(d.init, TraitLit):
            out[d.name] = TraitValue.of(d.init.methods)
            continue
        if isinstance(d, (TraitDecl, ClassDecl)):
            roots = [d.init]
        elif isinstance(d, FunDecl):
            roots = list(body_exprs(d.body)) + list(d.contract.predicates())
        else:
            roots = []
        k = 0
        for root in roots:
            for lit in _literals_in(root):
                k += 1
                out[f"{d.name}#{k}"] = TraitValue.of(lit.methods)
    return out


def verify_program_sources(p: Program, cfg: Optional[VerifyConfig] = None) -> dict[str, VerifyReport]:
    """Verify exactly the trait literals of the source; composed traits are
    correct by construction and are not re-verified."""
    cfg = cfg or VerifyConfig()
    return {name: verify_trait(t, cfg) for name, t in source_literals(p).items()}


def reverify_flattened(env, cfg: Optional[VerifyConfig] = None) -> dict[str, VerifyReport]:
    """Independent check: verify every materialized class body."""
    cfg = cfg or VerifyConfig()
    return {name: verify_trait(c.body, cfg) for name, c in sorted(env.classes.items())}
