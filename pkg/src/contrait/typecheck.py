"""Static well-formedness: trait literals, method bodies, contracts and
meta-level functions.

Object-level code (trait method bodies and contracts) may only use Int,
Bool and String values and call sibling methods. Meta-level code (trait and
class initializers, functions declared at top level) additionally handles
Trait values and the trait operators. Composition failures are not type
errors; they surface during compile-time evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .nodes import (
    BOOL, INT, STRING, TRAIT, Adapt, Binary, BoolLit, Call, ClassDecl, Expr,
    FunDecl, If, IntLit, LocalDecl, MethodDecl, New, Program, Return, Span,
    StrLit, This, TraitDecl, TraitLit, TypeName, Unary, Var, walk,
)

UNKNOWN_NAME = "UnknownName"
TYPE_MISMATCH = "TypeMismatch"
RESULT_OUTSIDE_POST = "ResultOutsidePost"
MISSING_RETURN = "MissingReturn"
TRAIT_OP_IN_OBJECT_CODE = "TraitOpInObjectCode"
ABSTRACT_WITH_BODY = "AbstractWithBody"
DUPLICATE_METHOD = "DuplicateMethod"
DUPLICATE_NAME = "DuplicateName"
BAD_CONTRACT_TYPE = "BadContractType"

RESERVED = {"this", "result"}
_ARITH = {"-", "*", "/", "%", "**"}
_ORDER = {"<", "<=", ">", ">="}


@dataclass(frozen=True)
class CheckError:
    span: Optional[Span]
    kind: str
    message: str

    def __str__(self) -> str:
        where = str(self.span) if self.span else "<unknown>"
        return f"{where}: {self.kind}: {self.message}"

    def to_dict(self) -> dict:
        s = self.span
        return {
            "file": s.file if s else None,
            "line": s.start_line if s else None,
            "col": s.start_col if s else None,
            "code": self.kind,
            "message": self.message,
        }


class _Checker:
    def __init__(self):
        self.errors: list[CheckError] = []

    def err(self, node, kind: str, message: str):
        self.errors.append(CheckError(getattr(node, "span", None), kind, message))
        return None

    # ------------------------------------------------------------ object level

    def check_trait(self, methods, span=None):
        seen = {}
        for m in methods:
            if m.name in seen:
                self.err(m, DUPLICATE_METHOD, f"method {m.name} declared twice")
            else:
                seen[m.name] = m
        for m in methods:
            self.check_method(m, seen)

    def check_method(self, m: MethodDecl, siblings: dict):
        sig = m.sig
        if m.marked_abstract and m.body is not None:
            self.err(m, ABSTRACT_WITH_BODY, f"abstract method {m.name} has a body")
        if sig.ret == TRAIT or TRAIT in sig.param_types:
            self.err(sig, TRAIT_OP_IN_OBJECT_CODE, f"trait method {m.name} cannot take or return Trait")
        scope = self.param_scope(sig)
        for pred in m.contract.requires:
            self.check_predicate(pred, scope, siblings, sig.ret, post=False)
        for pred in m.contract.ensures:
            self.check_predicate(pred, scope, siblings, sig.ret, post=True)
        if m.contract.hidden and m.body is None:
            self.err(m, BAD_CONTRACT_TYPE, f"abstract method {m.name} cannot carry hidden postconditions")
        for pred in m.contract.hidden:
            self.check_predicate(pred, scope, siblings, sig.ret, post=True)
        if m.body is not None:
            self.check_body(m.body, dict(scope), sig.ret, lambda e, sc: self.object_type(e, sc, siblings, None), m)

    def param_scope(self, sig) -> dict:
        scope = {}
        for p in sig.params:
            if p.name in RESERVED:
                self.err(p, TYPE_MISMATCH, f"'{p.name}' cannot be a parameter name")
            elif p.name in scope:
                self.err(p, DUPLICATE_NAME, f"parameter {p.name} declared twice")
            scope[p.name] = p.type
        return scope

    def check_predicate(self, pred: Expr, scope, siblings, ret, post: bool):
        ty = self.object_type(pred, scope, siblings, ret if post else None)
        if ty is not None and ty != BOOL:
            self.err(pred, BAD_CONTRACT_TYPE, f"contract predicate has type {ty}, expected Bool")

    def object_type(self, e: Expr, scope, siblings, result_type) -> Optional[TypeName]:
        """Type of an object-level expression; None after a reported error."""
        if isinstance(e, Var):
            if e.name == "result":
                if result_type is None:
                    return self.err(e, RESULT_OUTSIDE_POST, "'result' is only available in @ensures")
                return result_type
            if e.name in scope:
                return scope[e.name]
            return self.err(e, UNKNOWN_NAME, f"unknown name '{e.name}'")
        if isinstance(e, Call):
            if e.receiver is not None and not isinstance(e.receiver, This):
                return self.err(e, TYPE_MISMATCH, "trait code can only call methods on 'this'")
            callee = siblings.get(e.name)
            arg_types = [self.object_type(a, scope, siblings, result_type) for a in e.args]
            if callee is None:
                return self.err(e, UNKNOWN_NAME, f"unknown method '{e.name}'")
            self.check_args(e, callee.sig, arg_types)
            return callee.sig.ret
        if isinstance(e, (TraitLit, Adapt)):
            return self.err(e, TRAIT_OP_IN_OBJECT_CODE, "trait operations are only allowed in meta-level code")
        if isinstance(e, New):
            return self.err(e, TYPE_MISMATCH, "'new' is only allowed in top-level run expressions")
        return self.common(e, lambda x: self.object_type(x, scope, siblings, result_type), meta=False)

    def check_args(self, e: Call, sig, arg_types):
        if len(arg_types) != len(sig.params):
            self.err(e, TYPE_MISMATCH, f"{sig.name} expects {len(sig.params)} arguments, got {len(arg_types)}")
            return
        for p, ty in zip(sig.params, arg_types):
            if ty is not None and ty != p.type:
                self.err(e, TYPE_MISMATCH, f"argument {p.name} of {sig.name} expects {p.type}, got {ty}")

    def common(self, e: Expr, sub, meta: bool) -> Optional[TypeName]:
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, StrLit):
            return STRING
        if isinstance(e, This):
            return self.err(e, TYPE_MISMATCH, "'this' can only be used as a call receiver")
        if isinstance(e, Unary):
            ty = sub(e.operand)
            want = INT if e.op == "-" else BOOL
            if ty is not None and ty != want:
                return self.err(e, TYPE_MISMATCH, f"'{e.op}' expects {want}, got {ty}")
            return want
        if isinstance(e, Binary):
            lt, rt = sub(e.lhs), sub(e.rhs)
            if lt is None or rt is None:
                return None
            op = e.op
            if op == "+":
                if lt == rt == INT:
                    return INT
                if STRING in (lt, rt) and {lt, rt} <= {STRING, INT}:
                    return STRING
                if lt == rt == TRAIT:
                    if not meta:
                        return self.err(e, TRAIT_OP_IN_OBJECT_CODE, "trait sum in object code")
                    return TRAIT
                return self.err(e, TYPE_MISMATCH, f"cannot add {lt} and {rt}")
            if op in _ARITH:
                if lt == rt == INT:
                    return INT
                return self.err(e, TYPE_MISMATCH, f"'{op}' expects Int operands, got {lt} and {rt}")
            if op in _ORDER:
                if lt == rt == INT:
                    return BOOL
                return self.err(e, TYPE_MISMATCH, f"'{op}' expects Int operands, got {lt} and {rt}")
            if op in ("==", "!="):
                if lt != rt:
                    return self.err(e, TYPE_MISMATCH, f"cannot compare {lt} with {rt}")
                return BOOL
            if op in ("&&", "||"):
                if lt == rt == BOOL:
                    return BOOL
                return self.err(e, TYPE_MISMATCH, f"'{op}' expects Bool operands, got {lt} and {rt}")
        return self.err(e, TYPE_MISMATCH, f"unsupported expression {type(e).__name__}")

    def check_body(self, body, scope: dict, ret: TypeName, type_of, owner):
        if not body or not isinstance(body[-1], Return):
            self.err(owner, MISSING_RETURN, f"{owner.name} may finish without returning a value")
        for s in body:
            self.check_stmt(s, scope, ret, type_of)

    def check_stmt(self, s, scope: dict, ret, type_of):
        if isinstance(s, LocalDecl):
            ty = type_of(s.init, scope)
            if ty is not None and ty != s.type:
                self.err(s, TYPE_MISMATCH, f"{s.name} is declared {s.type} but initialised with {ty}")
            if s.name in RESERVED:
                self.err(s, TYPE_MISMATCH, f"'{s.name}' cannot be a variable name")
            elif s.name in scope:
                self.err(s, DUPLICATE_NAME, f"{s.name} is already defined")
            scope[s.name] = s.type
        elif isinstance(s, Return):
            ty = type_of(s.value, scope)
            if ty is not None and ty != ret:
                self.err(s, TYPE_MISMATCH, f"returns {ty}, expected {ret}")
        elif isinstance(s, If):
            ty = type_of(s.cond, scope)
            if ty is not None and ty != BOOL:
                self.err(s.cond, TYPE_MISMATCH, f"if condition has type {ty}, expected Bool")
            self.check_stmt(s.then, scope, ret, type_of)

    # ------------------------------------------------------------ meta level

    def meta_type(self, e: Expr, scope: dict, globals_: dict) -> Optional[TypeName]:
        if isinstance(e, Var):
            if e.name in scope:
                return scope[e.name]
            kind = globals_.get(e.name)
            if kind == "trait":
                return TRAIT
            if kind == "class":
                return self.err(e, TYPE_MISMATCH, f"class {e.name} is not a trait value")
            if isinstance(kind, FunDecl):
                return self.err(e, TYPE_MISMATCH, f"function {e.name} must be called")
            return self.err(e, UNKNOWN_NAME, f"unknown name '{e.name}'")
        if isinstance(e, TraitLit):
            self.check_trait(e.methods, e.span)
            return TRAIT
        if isinstance(e, Adapt):
            ty = self.meta_type(e.target, scope, globals_)
            if ty is not None and ty != TRAIT:
                return self.err(e, TYPE_MISMATCH, f"only traits can be adapted, got {ty}")
            return TRAIT
        if isinstance(e, Call):
            arg_types = [self.meta_type(a, scope, globals_) for a in e.args]
            if e.receiver is not None:
                return self.err(e, TYPE_MISMATCH, "method calls are not available at compile time")
            fn = globals_.get(e.name)
            if not isinstance(fn, FunDecl):
                return self.err(e, UNKNOWN_NAME, f"unknown function '{e.name}'")
            self.check_args(e, fn.sig, arg_types)
            return fn.sig.ret
        if isinstance(e, New):
            return self.err(e, TYPE_MISMATCH, "'new' is only allowed in top-level run expressions")
        return self.common(e, lambda x: self.meta_type(x, scope, globals_), meta=True)

    def check_function(self, f: FunDecl, globals_: dict):
        scope = self.param_scope(f.sig)
        post_scope = dict(scope)
        post_scope["result"] = f.sig.ret
        for pred in f.contract.requires:
            self._meta_predicate(pred, scope, globals_)
        for pred in f.contract.ensures + f.contract.hidden:
            self._meta_predicate(pred, post_scope, globals_)
        self.check_body(f.body, dict(scope), f.sig.ret,
                        lambda e, sc: self.meta_type(e, sc, globals_), f)

    def _meta_predicate(self, pred, scope, globals_):
        if "result" not in scope:
            for node in walk(pred):
                if isinstance(node, Var) and node.name == "result":
                    self.err(node, RESULT_OUTSIDE_POST, "'result' is only available in @ensures")
                    return
        ty = self.meta_type(pred, scope, globals_)
        if ty is not None and ty != BOOL:
            self.err(pred, BAD_CONTRACT_TYPE, f"contract predicate has type {ty}, expected Bool")

    def check_program(self, p: Program):
        globals_: dict = {}
        for d in p.decls:
            name = d.name
            if name in globals_:
                self.err(d, DUPLICATE_NAME, f"{name} is already declared")
            if isinstance(d, TraitDecl):
                self._expect_trait(d.init, globals_)
                globals_[name] = "trait"
            elif isinstance(d, ClassDecl):
                self._expect_trait(d.init, globals_)
                globals_[name] = "class"
            elif isinstance(d, FunDecl):
                globals_[name] = d  # visible in its own body: recursion
                self.check_function(d, globals_)

    def _expect_trait(self, e, globals_):
        ty = self.meta_type(e, {}, globals_)
        if ty is not None and ty != TRAIT:
            self.err(e, TYPE_MISMATCH, f"expected a Trait, got {ty}")


def check_program(p: Program) -> list[CheckError]:
    c = _Checker()
    c.check_program(p)
    return c.errors


def check_trait_lit(methods) -> list[CheckError]:
    """Check one trait literal given its method declarations (or a TraitValue)."""
    from .nodes import TraitValue

    if isinstance(methods, TraitValue):
        methods = methods.sorted()
    c = _Checker()
    c.check_trait(list(methods))
    return c.errors


def check_run_expr(e: Expr, classes) -> list[CheckError]:
    """Type a closed run expression: literals, operators and `new C().m(...)`."""
    c = _Checker()

    def ty(x):
        if isinstance(x, New):
            if x.class_name not in classes:
                return c.err(x, UNKNOWN_NAME, f"unknown class '{x.class_name}'")
            return TypeName("Class", x.class_name)
        if isinstance(x, Call):
            arg_types = [ty(a) for a in x.args]
            if x.receiver is None:
                return c.err(x, UNKNOWN_NAME, f"'{x.name}' needs an object receiver")
            rt = ty(x.receiver)
            if rt is None:
                return None
            if rt.cls is None:
                return c.err(x, TYPE_MISMATCH, f"cannot call {x.name} on {rt}")
            m = classes[rt.cls].body.methods.get(x.name)
            if m is None or not m.is_public:
                return c.err(x, UNKNOWN_NAME, f"{rt.cls} has no public method '{x.name}'")
            c.check_args(x, m.sig, arg_types)
            return m.sig.ret
        if isinstance(x, Var):
            return c.err(x, UNKNOWN_NAME, f"unknown name '{x.name}'")
        if isinstance(x, (TraitLit, Adapt)):
            return c.err(x, TRAIT_OP_IN_OBJECT_CODE, "trait operations are only allowed in meta-level code")
        return c.common(x, ty, meta=False)

    ty(e)
    return c.errors
