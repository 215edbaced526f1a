"""Structural equality modulo parameter naming, contract compatibility and
public structural shape."""

from __future__ import annotations

from collections.abc import Mapping

from .nodes import (
    Adapt, Binary, BoolLit, Call, Contract, Expr, IntLit, MethodDecl, New,
    StrLit, This, TraitLit, TraitValue, Unary, Var,
)
from .printer import expr as print_expr, signature as print_signature


def _self_receiver(r) -> bool:
    return r is None or isinstance(r, This)


def alpha_eq(a: Expr, b: Expr, param_map: Mapping[str, str]) -> bool:
    """True iff `a` and `b` are the same AST once `a`'s parameter names are
    mapped through `param_map`. Implicit and explicit `this` receivers are
    the same thing."""
    targets = set(param_map.values())

    def eq(x, y) -> bool:
        if isinstance(x, Var) and isinstance(y, Var):
            if x.name in param_map:
                return param_map[x.name] == y.name
            return x.name == y.name and y.name not in targets
        if type(x) is not type(y):
            return False
        if isinstance(x, (IntLit, BoolLit, StrLit)):
            return x.value == y.value
        if isinstance(x, This):
            return True
        if isinstance(x, New):
            return x.class_name == y.class_name
        if isinstance(x, Unary):
            return x.op == y.op and eq(x.operand, y.operand)
        if isinstance(x, Binary):
            return x.op == y.op and eq(x.lhs, y.lhs) and eq(x.rhs, y.rhs)
        if isinstance(x, Call):
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            if _self_receiver(x.receiver) != _self_receiver(y.receiver):
                return False
            if not _self_receiver(x.receiver) and not eq(x.receiver, y.receiver):
                return False
            return all(eq(p, q) for p, q in zip(x.args, y.args))
        if isinstance(x, Adapt):
            return x.adaptation == y.adaptation and eq(x.target, y.target)
        if isinstance(x, TraitLit):
            return x == y
        return x == y

    return eq(a, b)


def _multiset_eq(xs, ys, param_map) -> bool:
    if len(xs) != len(ys):
        return False
    unused = list(ys)
    for x in xs:
        for i, y in enumerate(unused):
            if alpha_eq(x, y, param_map):
                del unused[i]
                break
        else:
            return False
    return True


def contract_compatible(c1: Contract, c2: Contract, param_map: Mapping[str, str]) -> bool:
    """Public conjuncts must match as multisets; order is irrelevant.

    Hidden postconditions are not part of the public contract and are ignored.
    """
    return _multiset_eq(c1.requires, c2.requires, param_map) and _multiset_eq(
        c1.ensures, c2.ensures, param_map
    )


def param_map(m1: MethodDecl, m2: MethodDecl) -> dict[str, str]:
    return dict(zip(m1.sig.param_names, m2.sig.param_names))


def canonical_contract(m: MethodDecl) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Contract text with parameters renamed positionally; conjuncts sorted."""
    from .nodes import rename_vars

    mapping = {p: f"${i}" for i, p in enumerate(m.sig.param_names)}
    req = tuple(sorted(print_expr(rename_vars(e, mapping)) for e in m.contract.requires))
    ens = tuple(sorted(print_expr(rename_vars(e, mapping)) for e in m.contract.ensures))
    return req, ens


def structural_shape(t: TraitValue) -> frozenset:
    """Public interface: (name, param types, return type, contract, abstract?)."""
    shape = set()
    for m in t.public():
        sig = (m.name, tuple(str(ty) for ty in m.sig.param_types), str(m.sig.ret))
        shape.add((sig, canonical_contract(m), m.is_abstract))
    return frozenset(shape)


def shape_text(t: TraitValue) -> list[str]:
    """Human-readable shape, one line per public method."""
    out = []
    for m in t.public():
        req, ens = canonical_contract(m)
        kind = "abstract " if m.is_abstract else ""
        conj = " ".join([f"@requires({r})" for r in req] + [f"@ensures({e})" for e in ens])
        out.append(f"{conj} {kind}{print_signature(m.sig)}".strip())
    return out
