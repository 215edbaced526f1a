"""Shared AST for object-level code, contract predicates and meta-level code.

All nodes are frozen dataclasses. Source spans are carried on every node but
excluded from equality, so two nodes compare equal iff they are structurally
identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class Span:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TypeName:
    """One of Int, Bool, String, Trait, or Class(name) when `cls` is set."""

    name: str
    cls: Optional[str] = None

    def __str__(self) -> str:
        return self.name if self.cls is None else f"Class({self.cls})"


INT = TypeName("Int")
BOOL = TypeName("Bool")
STRING = TypeName("String")
TRAIT = TypeName("Trait")
BASE_TYPES = {"Int": INT, "Bool": BOOL, "String": STRING, "Trait": TRAIT}


def class_type(name: str) -> TypeName:
    return TypeName("Class", name)


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class StrLit(Expr):
    value: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class This(Expr):
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "-" or "!"
    operand: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Binary(Expr):
    """Binary operator. `+` on two Trait values is trait sum."""

    op: str
    lhs: Expr
    rhs: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Call(Expr):
    receiver: Optional[Expr]
    name: str
    args: tuple[Expr, ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class New(Expr):
    class_name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TraitLit(Expr):
    methods: tuple["MethodDecl", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SigRef:
    """A method reference inside an adaptation, e.g. `pow(x)`."""

    name: str
    params: tuple[str, ...] = ()
    span: Optional[Span] = _span()

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.params)})"


@dataclass(frozen=True)
class Rename:
    mappings: tuple[tuple[SigRef, SigRef], ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Hide:
    refs: tuple[SigRef, ...]
    span: Optional[Span] = _span()


Adaptation = Union[Rename, Hide]


@dataclass(frozen=True)
class Adapt(Expr):
    target: Expr
    adaptation: Adaptation
    span: Optional[Span] = _span()


# ---------------------------------------------------------------- statements

@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class LocalDecl(Stmt):
    type: TypeName
    name: str
    init: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Return(Stmt):
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    span: Optional[Span] = _span()


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class Param:
    name: str
    type: TypeName
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[Param, ...]
    ret: TypeName
    span: Optional[Span] = _span()

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @property
    def param_types(self) -> tuple[TypeName, ...]:
        return tuple(p.type for p in self.params)


@dataclass(frozen=True)
class Contract:
    """Conjunct lists. `hidden` holds postconditions that are no longer part
    of the public shape because they mention methods that were hidden."""

    requires: tuple[Expr, ...] = ()
    ensures: tuple[Expr, ...] = ()
    hidden: tuple[Expr, ...] = ()

    def all_ensures(self) -> tuple[Expr, ...]:
        return self.ensures + self.hidden

    def predicates(self) -> tuple[Expr, ...]:
        return self.requires + self.ensures + self.hidden

    def map(self, fn) -> "Contract":
        return Contract(
            tuple(fn(e) for e in self.requires),
            tuple(fn(e) for e in self.ensures),
            tuple(fn(e) for e in self.hidden),
        )


EMPTY_CONTRACT = Contract()

PUBLIC = "public"
PRIVATE = "private"


@dataclass(frozen=True)
class MethodDecl:
    sig: Signature
    contract: Contract = EMPTY_CONTRACT
    body: Optional[tuple[Stmt, ...]] = None
    visibility: str = PUBLIC
    # `abstract` keyword written together with a body; rejected by typecheck
    marked_abstract: bool = field(default=False, compare=False, repr=False)
    span: Optional[Span] = _span()

    @property
    def name(self) -> str:
        return self.sig.name

    @property
    def is_abstract(self) -> bool:
        return self.body is None

    @property
    def is_public(self) -> bool:
        return self.visibility == PUBLIC


@dataclass(frozen=True)
class TraitValue:
    """A finite map from method names to declarations.

    Treat as immutable: operators always build new values.
    """

    methods: dict[str, MethodDecl] = field(default_factory=dict)

    @classmethod
    def of(cls, methods) -> "TraitValue":
        return cls({m.name: m for m in sorted(methods, key=lambda m: m.name)})

    def __getitem__(self, name: str) -> MethodDecl:
        return self.methods[name]

    def __contains__(self, name: str) -> bool:
        return name in self.methods

    def __iter__(self) -> Iterator[MethodDecl]:
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.methods)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TraitValue):
            return NotImplemented
        return self.methods == other.methods

    def __hash__(self):
        return hash(tuple(sorted(self.methods)))

    def sorted(self) -> list[MethodDecl]:
        return [self.methods[n] for n in sorted(self.methods)]

    def public(self) -> list[MethodDecl]:
        return [m for m in self.sorted() if m.is_public]

    def abstract_public(self) -> list[str]:
        return [m.name for m in self.public() if m.is_abstract]


# ---------------------------------------------------------------- program

@dataclass(frozen=True)
class TraitDecl:
    name: str
    init: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class FunDecl:
    contract: Contract
    sig: Signature
    body: tuple[Stmt, ...]
    span: Optional[Span] = _span()

    @property
    def name(self) -> str:
        return self.sig.name


@dataclass(frozen=True)
class ClassDecl:
    name: str
    init: Expr
    span: Optional[Span] = _span()


Decl = Union[TraitDecl, FunDecl, ClassDecl]


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...] = ()

    def __add__(self, other: "Program") -> "Program":
        return Program(self.decls + other.decls)


# ---------------------------------------------------------------- traversal

def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.lhs, e.rhs)
    if isinstance(e, Call):
        return ((e.receiver,) if e.receiver is not None else ()) + e.args
    if isinstance(e, Adapt):
        return (e.target,)
    return ()


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal. Does not descend into trait literals."""
    yield e
    for c in children(e):
        yield from walk(c)


def stmt_exprs(s: Stmt) -> Iterator[Expr]:
    if isinstance(s, LocalDecl):
        yield s.init
    elif isinstance(s, Return):
        yield s.value
    elif isinstance(s, If):
        yield s.cond
        yield from stmt_exprs(s.then)


def body_exprs(body) -> Iterator[Expr]:
    for s in body or ():
        yield from stmt_exprs(s)


def is_self_call(e: Expr) -> bool:
    return isinstance(e, Call) and (e.receiver is None or isinstance(e.receiver, This))


def called_names(exprs) -> set[str]:
    out = set()
    for root in exprs:
        for e in walk(root):
            if is_self_call(e):
                out.add(e.name)
    return out


def method_calls(m: MethodDecl, include_contract: bool = True) -> set[str]:
    exprs = list(body_exprs(m.body))
    if include_contract:
        exprs.extend(m.contract.predicates())
    return called_names(exprs)


def map_expr(e: Expr, fn) -> Expr:
    """Bottom-up rebuild: children first, then `fn` on the rebuilt node."""
    if isinstance(e, Unary):
        e = replace(e, operand=map_expr(e.operand, fn))
    elif isinstance(e, Binary):
        e = replace(e, lhs=map_expr(e.lhs, fn), rhs=map_expr(e.rhs, fn))
    elif isinstance(e, Call):
        recv = map_expr(e.receiver, fn) if e.receiver is not None else None
        e = replace(e, receiver=recv, args=tuple(map_expr(a, fn) for a in e.args))
    elif isinstance(e, Adapt):
        e = replace(e, target=map_expr(e.target, fn))
    return fn(e)


def map_stmt(s: Stmt, fn) -> Stmt:
    if isinstance(s, LocalDecl):
        return replace(s, init=map_expr(s.init, fn))
    if isinstance(s, Return):
        return replace(s, value=map_expr(s.value, fn))
    if isinstance(s, If):
        return replace(s, cond=map_expr(s.cond, fn), then=map_stmt(s.then, fn))
    raise TypeError(s)


def map_method(m: MethodDecl, fn) -> MethodDecl:
    body = None if m.body is None else tuple(map_stmt(s, fn) for s in m.body)
    return replace(m, body=body, contract=m.contract.map(lambda e: map_expr(e, fn)))


def rename_vars(e: Expr, mapping: dict[str, str]) -> Expr:
    def fn(n):
        if isinstance(n, Var) and n.name in mapping:
            return replace(n, name=mapping[n.name])
        return n

    return map_expr(e, fn)


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    def fn(n):
        if isinstance(n, Var) and n.name in mapping:
            return mapping[n.name]
        return n

    return map_expr(e, fn)


def strip_spans(x):
    """Drop every span; handy for building fixtures that print identically."""
    from dataclasses import fields, is_dataclass

    if isinstance(x, tuple):
        return tuple(strip_spans(i) for i in x)
    if isinstance(x, dict):
        return {k: strip_spans(v) for k, v in x.items()}
    if isinstance(x, TraitValue):
        return TraitValue(strip_spans(x.methods))
    if is_dataclass(x) and not isinstance(x, type):
        changes = {}
        for f in fields(x):
            v = getattr(x, f.name)
            if f.name == "span":
                changes[f.name] = None
            elif isinstance(v, (tuple, dict)) or is_dataclass(v):
                changes[f.name] = strip_spans(v)
        return replace(x, **changes)
    return x
