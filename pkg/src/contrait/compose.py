"""Correctness-preserving trait operators: sum, rename and hide.

Every operator is a pure function from TraitValues to a new TraitValue and
validates its result. Failures raise :class:`ComposeError`.

Hiding a method makes it private. Private methods whose body is a run of
local declarations followed by a single return are then inlined into their
callers and dropped once nothing refers to them. Postcondition conjuncts of
public concrete methods that mention a hidden method move to the contract's
``hidden`` list: they stay attached to the code (so the method keeps its full
guarantee for internal callers) but are no longer part of the public shape.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import replace

from .equiv import contract_compatible, param_map, structural_shape  # noqa: F401
from .errors import (
    BOTH_CONCRETE, CONTRACT_MISMATCH, HIDDEN_ABSTRACT_STILL_CALLED, INVALID_TRAIT,
    RENAME_COLLISION, SIGNATURE_MISMATCH, UNKNOWN_METHOD, ComposeError, ComposeWarning,
)
from .nodes import (
    PRIVATE, Binary, Call, Expr, If, LocalDecl, MethodDecl, Return, SigRef,
    TraitValue, Unary, body_exprs, called_names, children, is_self_call,
    map_expr, map_method, map_stmt, method_calls, rename_vars, substitute, walk,
)
from .printer import contract_text, expr as print_expr, signature as print_signature

MAX_INLINE_ROUNDS = 64


# ---------------------------------------------------------------- validation

def validate(t: TraitValue) -> TraitValue:
    """Check the TraitValue invariants; raise ComposeError(InvalidTrait)."""
    for name, m in t.methods.items():
        if name != m.name:
            raise ComposeError(INVALID_TRAIT, f"key {name!r} holds method {m.name!r}", [name])
        exprs = list(m.contract.predicates())
        exprs.extend(body_exprs(m.body))
        for root in exprs:
            for e in walk(root):
                if not is_self_call(e):
                    continue
                callee = t.methods.get(e.name)
                if callee is None:
                    raise ComposeError(INVALID_TRAIT, f"{name} calls unknown method {e.name}", [name, e.name])
                if len(callee.sig.params) != len(e.args):
                    raise ComposeError(INVALID_TRAIT, f"{name} calls {e.name} with wrong arity", [name, e.name])
    return t


# ---------------------------------------------------------------- sum

def _same_signature(m1: MethodDecl, m2: MethodDecl) -> bool:
    return m1.sig.param_types == m2.sig.param_types and m1.sig.ret == m2.sig.ret


def sum_traits(t1: TraitValue, t2: TraitValue) -> TraitValue:
    """Union of methods. A name present in both operands needs at least one
    abstract side, equal signatures and compatible public contracts."""
    out = dict(t1.methods)
    for name, m2 in t2.methods.items():
        m1 = out.get(name)
        if m1 is None:
            out[name] = m2
            continue
        if not (m1.is_public and m2.is_public):
            raise ComposeError(RENAME_COLLISION, f"private method {name} collides with a method of the other operand", [name])
        if not _same_signature(m1, m2):
            raise ComposeError(
                SIGNATURE_MISMATCH,
                f"{print_signature(m1.sig)} vs {print_signature(m2.sig)}",
                [name],
            )
        if not (m1.is_abstract or m2.is_abstract):
            raise ComposeError(BOTH_CONCRETE, f"both operands implement {name}", [name])
        if not contract_compatible(m1.contract, m2.contract, param_map(m1, m2)):
            left, right = contract_text(m1.contract), contract_text(m2.contract)
            raise ComposeError(
                CONTRACT_MISMATCH,
                f"contracts of {name} differ: {left} vs {right}",
                [name], left=left, right=right,
            )
        out[name] = m2 if m1.is_abstract and not m2.is_abstract else m1
    return validate(TraitValue.of(out.values()))


# ---------------------------------------------------------------- rename

def _rename_calls(m: MethodDecl, mapping: dict[str, str]) -> MethodDecl:
    def fn(e):
        if is_self_call(e) and e.name in mapping:
            return replace(e, name=mapping[e.name])
        return e

    m = map_method(m, fn)
    if m.name in mapping:
        m = replace(m, sig=replace(m.sig, name=mapping[m.name]))
    return m


def _check_arity(ref: SigRef, m: MethodDecl):
    if len(ref.params) != len(m.sig.params):
        raise ComposeError(
            SIGNATURE_MISMATCH,
            f"{ref} does not match {print_signature(m.sig)}",
            [m.name],
        )


def rename(t: TraitValue, mappings) -> TraitValue:
    """Apply all (from, to) mappings simultaneously to declarations, call
    sites and contract predicates."""
    mapping: dict[str, str] = {}
    targets: set[str] = set()
    for src, dst in mappings:
        m = t.methods.get(src.name)
        if m is None or not m.is_public:
            raise ComposeError(UNKNOWN_METHOD, f"cannot rename unknown method {src}", [src.name])
        if src.name in mapping:
            raise ComposeError(RENAME_COLLISION, f"{src.name} renamed twice", [src.name])
        _check_arity(src, m)
        _check_arity(dst, m)
        if dst.name in targets:
            raise ComposeError(RENAME_COLLISION, f"two methods renamed to {dst.name}", [dst.name])
        mapping[src.name] = dst.name
        targets.add(dst.name)
    survivors = set(t.methods) - set(mapping)
    for dst in targets & survivors:
        raise ComposeError(RENAME_COLLISION, f"{dst} already exists", [dst])
    if not mapping:
        return t
    return validate(TraitValue.of(_rename_calls(m, mapping) for m in t.methods.values()))


# ---------------------------------------------------------------- hide

def hide(t: TraitValue, refs) -> TraitValue:
    """Make the referenced methods private, then inline and drop what can go."""
    hidden: set[str] = set()
    for ref in refs:
        m = t.methods.get(ref.name)
        if m is None or not m.is_public:
            raise ComposeError(UNKNOWN_METHOD, f"cannot hide unknown method {ref}", [ref.name])
        _check_arity(ref, m)
        hidden.add(ref.name)
    methods = {
        n: (replace(m, visibility=PRIVATE) if n in hidden else m)
        for n, m in t.methods.items()
    }
    private = {n for n, m in methods.items() if not m.is_public}
    for n, m in list(methods.items()):
        if not m.is_public or m.is_abstract:
            continue
        keep, moved = [], []
        for conj in m.contract.ensures:
            (moved if called_names([conj]) & private else keep).append(conj)
        if moved:
            for conj in moved:
                warnings.warn(
                    f"postcondition `{print_expr(conj)}` of {n} mentions a hidden method "
                    "and leaves the public contract",
                    ComposeWarning,
                    stacklevel=2,
                )
            methods[n] = replace(m, contract=replace(
                m.contract, ensures=tuple(keep), hidden=m.contract.hidden + tuple(moved)))
    result = inline_and_drop(TraitValue.of(methods.values()))
    for name in sorted(hidden):
        m = t.methods[name]
        if not m.is_abstract:
            continue
        if name in result.methods:
            users = sorted(u.name for u in result.methods.values()
                           if u.name != name and name in method_calls(u))
            raise ComposeError(
                HIDDEN_ABSTRACT_STILL_CALLED,
                f"hidden abstract method {name} is still used by {', '.join(users)}",
                [name, *users],
            )
        warnings.warn(f"hidden abstract method {name} was unused and has been removed",
                      ComposeWarning, stacklevel=2)
    return validate(result)


# ---------------------------------------------------------------- inlining

def _local_names(body) -> set[str]:
    names = set()
    for s in body or ():
        while isinstance(s, If):
            s = s.then
        if isinstance(s, LocalDecl):
            names.add(s.name)
    return names


def inlinable(m: MethodDecl) -> bool:
    """Private, concrete, straight-line (locals then one return), not
    directly recursive."""
    if m.is_public or m.body is None or not m.body:
        return False
    *locals_, last = m.body
    if not isinstance(last, Return) or not all(isinstance(s, LocalDecl) for s in locals_):
        return False
    return m.name not in method_calls(m, include_contract=False)


def as_expression(m: MethodDecl, args) -> Expr:
    """The value of a straight-line body, with arguments substituted."""
    *locals_, last = m.body
    e = last.value
    for decl in reversed(locals_):
        e = substitute(e, {decl.name: decl.init})
    return substitute(e, dict(zip(m.sig.param_names, args)))


_TRAILING_DIGITS = re.compile(r"\d+$")


class _Fresh:
    """Deterministic fresh names: base name plus the smallest free suffix."""

    def __init__(self, used: set[str]):
        self.used = set(used) | {"this", "result"}

    def __call__(self, name: str) -> str:
        base = _TRAILING_DIGITS.sub("", name) or name
        k = 0
        while f"{base}{k}" in self.used:
            k += 1
        fresh = f"{base}{k}"
        self.used.add(fresh)
        return fresh


def _is_call_to(e: Expr, name: str) -> bool:
    return is_self_call(e) and e.name == name


def _splice(callee: MethodDecl, args, fresh: _Fresh, prelude: list) -> Expr:
    renames = {}
    for p, arg in zip(callee.sig.params, args):
        renames[p.name] = fresh(p.name)
        prelude.append(LocalDecl(p.type, renames[p.name], arg))
    *locals_, last = callee.body
    for decl in locals_:
        new_name = fresh(decl.name)
        prelude.append(LocalDecl(decl.type, new_name, rename_vars(decl.init, renames)))
        renames[decl.name] = new_name
    return rename_vars(last.value, renames)


def _hoist(e: Expr, callee: MethodDecl, fresh: _Fresh, prelude: list) -> Expr:
    """Replace calls to `callee` that are evaluated whenever `e` is."""
    if _is_call_to(e, callee.name):
        args = tuple(_hoist(a, callee, fresh, prelude) for a in e.args)
        return _splice(callee, args, fresh, prelude)
    if isinstance(e, Binary) and e.op in ("&&", "||"):
        return replace(e, lhs=_hoist(e.lhs, callee, fresh, prelude))
    if not children(e):
        return e
    if isinstance(e, Binary):
        lhs = _hoist(e.lhs, callee, fresh, prelude)
        return replace(e, lhs=lhs, rhs=_hoist(e.rhs, callee, fresh, prelude))
    if isinstance(e, Call):
        recv = e.receiver if e.receiver is None else _hoist(e.receiver, callee, fresh, prelude)
        return replace(e, receiver=recv, args=tuple(_hoist(a, callee, fresh, prelude) for a in e.args))
    if isinstance(e, Unary):
        return replace(e, operand=_hoist(e.operand, callee, fresh, prelude))
    return e


def _substitute_calls(e: Expr, callee: MethodDecl) -> Expr:
    def fn(n):
        if _is_call_to(n, callee.name):
            return as_expression(callee, n.args)
        return n

    return map_expr(e, fn)


def _inline_into(host: MethodDecl, callee: MethodDecl) -> MethodDecl:
    if callee.name not in method_calls(host):
        return host
    contract = host.contract.map(lambda e: _substitute_calls(e, callee))
    if host.body is None:
        return replace(host, contract=contract)
    trivial = len(callee.body) == 1 and not callee.sig.params
    body = []
    if trivial:
        body = [map_stmt(s, lambda n: as_expression(callee, ()) if _is_call_to(n, callee.name) else n)
                for s in host.body]
    else:
        fresh = _Fresh(set(host.sig.param_names) | _local_names(host.body))
        for s in host.body:
            prelude: list = []
            if isinstance(s, LocalDecl):
                s = replace(s, init=_hoist(s.init, callee, fresh, prelude))
            elif isinstance(s, Return):
                s = replace(s, value=_hoist(s.value, callee, fresh, prelude))
            elif isinstance(s, If):
                s = replace(s, cond=_hoist(s.cond, callee, fresh, prelude))
            body.extend(prelude)
            body.append(s)
    return replace(host, body=tuple(body), contract=contract)


def _referenced(methods: dict[str, MethodDecl]) -> set[str]:
    refs = set()
    for m in methods.values():
        refs |= method_calls(m) - {m.name}
    return refs


def inline_and_drop(t: TraitValue) -> TraitValue:
    """Inline straight-line private methods at their call sites and delete
    private methods nothing refers to any more."""
    methods = dict(t.methods)
    for _ in range(MAX_INLINE_ROUNDS):
        changed = False
        for name in sorted(methods):
            callee = methods.get(name)
            if callee is None or not inlinable(callee):
                continue
            for host_name in sorted(methods):
                if host_name == name:
                    continue
                host = methods[host_name]
                new = _inline_into(host, callee)
                if new != host:
                    methods[host_name] = new
                    changed = True
        if not changed:
            break
    while True:
        refs = _referenced(methods)
        dead = [n for n, m in methods.items() if not m.is_public and n not in refs]
        if not dead:
            break
        for n in dead:
            del methods[n]
    return TraitValue.of(methods.values())


def count_ops(t: TraitValue, method: str, op: str = "*") -> int:
    """Number of `op` nodes in a method body."""
    return sum(1 for root in body_exprs(t[method].body) for e in walk(root)
               if isinstance(e, Binary) and e.op == op)


__all__ = [
    "validate", "sum_traits", "rename", "hide", "inline_and_drop", "inlinable",
    "structural_shape", "contract_compatible", "count_ops",
]
