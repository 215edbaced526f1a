"""Exception types shared across the pipeline."""

from __future__ import annotations

from typing import Optional

from .nodes import Span


class ContraitError(Exception):
    pass


class ParseError(ContraitError):
    def __init__(self, span: Span, message: str, expected=()):
        self.span = span
        self.message = message or "syntax error"
        self.expected = list(expected)
        super().__init__(f"{span}: {self.message}")


# Compose error kinds.
BOTH_CONCRETE = "BothConcrete"
SIGNATURE_MISMATCH = "SignatureMismatch"
CONTRACT_MISMATCH = "ContractMismatch"
UNKNOWN_METHOD = "UnknownMethod"
RENAME_COLLISION = "RenameCollision"
HIDDEN_ABSTRACT_STILL_CALLED = "HiddenAbstractStillCalled"
INVALID_TRAIT = "InvalidTrait"


class ComposeError(ContraitError):
    """Raised by sum/rename/hide. ContractMismatch carries both contracts
    rendered canonically in `left` and `right`."""

    def __init__(self, kind: str, message: str, methods=(), left: str = "", right: str = ""):
        self.kind = kind
        self.methods = list(methods)
        self.left = left
        self.right = right
        super().__init__(f"{kind}: {message}")

    def details(self) -> dict:
        return {"kind": self.kind, "methods": self.methods, "left": self.left, "right": self.right}


class ComposeWarning(UserWarning):
    """Emitted when hide moves a postcondition conjunct out of the public shape."""


class EvalFault(ContraitError):
    """Dynamic failure: division by zero, negative exponent, depth limit..."""

    def __init__(self, message: str, span: Optional[Span] = None, kind: str = "EvalFault"):
        self.kind = kind
        self.span = span
        super().__init__(message)


class DepthLimit(EvalFault):
    def __init__(self, limit: int, span: Optional[Span] = None):
        super().__init__(f"call depth limit {limit} exceeded", span, kind="DepthLimit")


class ContractViolation(ContraitError):
    """A requires (on entry) or ensures (on exit) conjunct evaluated to false."""

    def __init__(self, method: str, kind: str, predicate: str, bindings: dict, span=None):
        self.method = method
        self.kind = kind  # "Requires" | "Ensures"
        self.predicate = predicate
        self.bindings = dict(bindings)
        self.span = span
        shown = ", ".join(f"{k}={_show(v)}" for k, v in self.bindings.items())
        super().__init__(f"{kind} violation in {method}: {predicate} [{shown}]")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "kind": self.kind,
            "predicate": self.predicate,
            "bindings": {k: _show(v) for k, v in self.bindings.items()},
        }


class MetaError(ContraitError):
    """A failure during compile-time evaluation, with the meta call chain."""

    def __init__(self, cause: Exception, meta_stack=()):
        self.cause = cause
        self.meta_stack = list(meta_stack)
        frames = " <- ".join(reversed([f"{n}({', '.join(map(_show, a))})" for n, a in self.meta_stack]))
        where = f" [in {frames}]" if frames else ""
        super().__init__(f"compile-time error: {cause}{where}")

    def stack_text(self) -> list[str]:
        return [f"{n}({', '.join(_show(a) for a in args)})" for n, args in self.meta_stack]


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    from .nodes import TraitValue

    if isinstance(v, TraitValue):
        return f"<trait {', '.join(sorted(v.methods))}>"
    return str(v)


show_value = _show
