"""Object-level execution with optional runtime contract checking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .deep import run_deep
from .errors import ContractViolation, DepthLimit, EvalFault
from .interp import Evaluator
from .nodes import Call, Expr, New, TraitValue, is_self_call
from .printer import expr as print_expr

CHECKED = "checked"
UNCHECKED = "unchecked"
DEFAULT_CALL_DEPTH = 2_000


@dataclass(frozen=True)
class ClassDef:
    name: str
    body: TraitValue


@dataclass(frozen=True)
class ObjectRef:
    """A stateless instance: classes have no fields."""

    cls: ClassDef

    def __str__(self) -> str:
        return f"<{self.cls.name} object>"


class Machine(Evaluator):
    def __init__(self, classes: Mapping[str, ClassDef], mode: str = CHECKED,
                 depth_limit: int = DEFAULT_CALL_DEPTH):
        self.classes = classes
        self.mode = mode
        self.depth_limit = depth_limit
        self.depth = 0
        self._predicates: Optional[Machine] = None

    @property
    def predicates(self) -> "Machine":
        # contract predicates run unchecked so checking never recurses
        if self.mode == UNCHECKED:
            return self
        if self._predicates is None:
            self._predicates = Machine(self.classes, UNCHECKED, self.depth_limit)
        return self._predicates

    def new(self, e: New, env):
        try:
            return ObjectRef(self.classes[e.class_name])
        except KeyError:
            raise EvalFault(f"unknown class '{e.class_name}'", e.span, kind="UnknownClass") from None

    def call(self, e: Call, receiver, args, env):
        if is_self_call(e):
            current = env.get("this")
            if not isinstance(current, ObjectRef):
                raise EvalFault(f"call to '{e.name}' without an object", e.span)
            return self.invoke(current.cls, e.name, args, internal=True, span=e.span)
        if not isinstance(receiver, ObjectRef):
            raise EvalFault(f"method call on a non-object ({e.name})", e.span)
        return self.invoke(receiver.cls, e.name, args, internal=False, span=e.span)

    def invoke(self, cls: ClassDef, name: str, args, internal: bool = False, span=None):
        m = cls.body.methods.get(name)
        if m is None or (not internal and not m.is_public):
            raise EvalFault(f"{cls.name} has no public method '{name}'", span, kind="NoSuchMethod")
        if len(args) != len(m.sig.params):
            raise EvalFault(f"{name} expects {len(m.sig.params)} arguments, got {len(args)}", span)
        if m.is_abstract:
            raise EvalFault(f"call to abstract method '{name}'", span, kind="AbstractCall")
        this = ObjectRef(cls)
        env = {"this": this, **dict(zip(m.sig.param_names, args))}
        checked = self.mode == CHECKED
        if checked:
            for pred in m.contract.requires:
                self._check(pred, dict(env), m.name, "Requires", m.sig.param_names)
        self.depth += 1
        try:
            if self.depth > self.depth_limit:
                raise DepthLimit(self.depth_limit, span)
            result = self.exec_body(m.body, env)
        except RecursionError:
            raise DepthLimit(self.depth_limit, span) from None
        finally:
            self.depth -= 1
        if checked:
            post_env = {"this": this, **dict(zip(m.sig.param_names, args)), "result": result}
            for pred in m.contract.all_ensures():
                self._check(pred, dict(post_env), m.name, "Ensures", m.sig.param_names + ("result",))
        return result

    def _check(self, pred: Expr, env: dict, method: str, kind: str, shown):
        ok = self.predicates.eval(pred, env)
        if ok is not True:
            bindings = {k: env[k] for k in shown}
            raise ContractViolation(method, kind, print_expr(pred), bindings, span=pred.span)


def eval_expr(e: Expr, classes: Mapping[str, ClassDef], mode: str = CHECKED):
    """Evaluate a closed object-level expression such as `new Pow7().pow(3)`."""
    return run_deep(Machine(classes, mode).eval, e, {})


def invoke(cls: ClassDef, name: str, args, mode: str = CHECKED, classes=None):
    classes = classes if classes is not None else {cls.name: cls}
    return run_deep(Machine(classes, mode).invoke, cls, name, list(args))
