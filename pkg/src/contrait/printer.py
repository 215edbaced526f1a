"""Canonical pretty-printer.

Methods are sorted by name, indentation is two spaces, each contract
conjunct sits on its own line and binary operators get single spaces.
Parentheses are emitted only where precedence requires them, so
``parse(pretty(x)) == x`` for every well-formed ``x``.
"""

from __future__ import annotations

from .nodes import (
    Adapt, Binary, BoolLit, Call, ClassDecl, Contract, Expr, FunDecl, Hide, If,
    IntLit, LocalDecl, MethodDecl, New, Program, Rename, Return, Signature,
    StrLit, This, TraitDecl, TraitLit, TraitValue, Unary, Var,
)

_BINARY_LEVEL = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
    "**": 6,
}
UNARY_LEVEL = 7
POSTFIX_LEVEL = 8
ATOM_LEVEL = 9
INDENT = "  "


def level(e: Expr) -> int:
    if isinstance(e, Binary):
        return _BINARY_LEVEL[e.op]
    if isinstance(e, Unary):
        return UNARY_LEVEL
    if isinstance(e, IntLit) and e.value < 0:
        return UNARY_LEVEL
    if isinstance(e, (Call, Adapt)) and not (isinstance(e, Call) and e.receiver is None):
        return POSTFIX_LEVEL
    return ATOM_LEVEL


def quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def expr(e: Expr, indent: str = "") -> str:
    return _expr(e, 0, indent)


def _wrap(e: Expr, min_level: int, indent: str) -> str:
    return _expr(e, min_level, indent)


def _expr(e: Expr, min_level: int, indent: str) -> str:
    text = _bare(e, indent)
    if level(e) < min_level:
        return f"({text})"
    return text


def _bare(e: Expr, indent: str) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, StrLit):
        return quote(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, This):
        return "this"
    if isinstance(e, New):
        return f"new {e.class_name}()"
    if isinstance(e, Unary):
        inner = _wrap(e.operand, UNARY_LEVEL, indent)
        if e.op == "-" and (inner[0] == "-" or isinstance(e.operand, IntLit)):
            inner = f"({inner})"  # keep `-` apart from a literal or another `-`
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        lv = _BINARY_LEVEL[e.op]
        if e.op == "**":
            lhs, rhs = _wrap(e.lhs, UNARY_LEVEL, indent), _wrap(e.rhs, lv, indent)
        elif lv == 3:
            lhs, rhs = _wrap(e.lhs, lv + 1, indent), _wrap(e.rhs, lv + 1, indent)
        else:
            lhs, rhs = _wrap(e.lhs, lv, indent), _wrap(e.rhs, lv + 1, indent)
        return f"{lhs} {e.op} {rhs}"
    if isinstance(e, Call):
        args = ", ".join(expr(a, indent) for a in e.args)
        if e.receiver is None:
            return f"{e.name}({args})"
        return f"{_wrap(e.receiver, POSTFIX_LEVEL, indent)}.{e.name}({args})"
    if isinstance(e, Adapt):
        return f"{_wrap(e.target, POSTFIX_LEVEL, indent)}[{adaptation(e.adaptation)}]"
    if isinstance(e, TraitLit):
        return trait_methods(e.methods, indent)
    raise TypeError(f"cannot print {e!r}")


def adaptation(a) -> str:
    if isinstance(a, Rename):
        return "rename " + ", ".join(f"{s} -> {d}" for s, d in a.mappings)
    if isinstance(a, Hide):
        return "hide " + ", ".join(str(r) for r in a.refs)
    raise TypeError(a)


def signature(sig: Signature) -> str:
    params = ", ".join(f"{p.type} {p.name}" for p in sig.params)
    return f"{sig.ret} {sig.name}({params})"


def contract_lines(c: Contract, indent: str) -> list[str]:
    lines = [f"{indent}@requires({expr(p, indent)})" for p in c.requires]
    lines += [f"{indent}@ensures({expr(p, indent)})" for p in c.ensures]
    lines += [f"{indent}@hidden_ensures({expr(p, indent)})" for p in c.hidden]
    return lines


def stmt(s, indent: str) -> str:
    if isinstance(s, LocalDecl):
        return f"{s.type} {s.name} = {expr(s.init, indent)};"
    if isinstance(s, Return):
        return f"return {expr(s.value, indent)};"
    if isinstance(s, If):
        return f"if ({expr(s.cond, indent)}) {stmt(s.then, indent)}"
    raise TypeError(s)


def block_lines(body, indent: str) -> list[str]:
    inner = indent + INDENT
    return [f"{inner}{stmt(s, inner)}" for s in body]


def method_lines(m: MethodDecl, indent: str) -> list[str]:
    lines = contract_lines(m.contract, indent)
    mods = "private " if not m.is_public else ""
    if m.is_abstract:
        lines.append(f"{indent}{mods}abstract {signature(m.sig)};")
    else:
        lines.append(f"{indent}{mods}{signature(m.sig)} {{")
        lines += block_lines(m.body, indent)
        lines.append(f"{indent}}}")
    return lines


def trait_methods(methods, indent: str = "") -> str:
    inner = indent + INDENT
    lines = ["class {"]
    for m in sorted(methods, key=lambda m: m.name):
        lines += method_lines(m, inner)
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def pretty(x) -> str:
    """Canonical text of a TraitValue, MethodDecl, Program, or expression."""
    if isinstance(x, TraitValue):
        return trait_methods(x.methods.values())
    if isinstance(x, MethodDecl):
        return "\n".join(method_lines(x, ""))
    if isinstance(x, Program):
        return "\n\n".join(decl(d) for d in x.decls) + ("\n" if x.decls else "")
    if isinstance(x, Expr):
        return expr(x)
    raise TypeError(f"cannot print {type(x).__name__}")


def decl(d) -> str:
    if isinstance(d, TraitDecl):
        return f"Trait {d.name} = {expr(d.init)}"
    if isinstance(d, ClassDecl):
        return f"class {d.name}: {expr(d.init)}"
    if isinstance(d, FunDecl):
        lines = contract_lines(d.contract, "")
        lines.append(f"{signature(d.sig)} {{")
        lines += block_lines(d.body, "")
        lines.append("}")
        return "\n".join(lines)
    raise TypeError(d)


def contract_text(c: Contract) -> str:
    """Single-line canonical rendering, used in diagnostics."""
    parts = [f"@requires({expr(p)})" for p in c.requires]
    parts += [f"@ensures({expr(p)})" for p in c.ensures]
    return " ".join(parts) if parts else "(no contract)"
