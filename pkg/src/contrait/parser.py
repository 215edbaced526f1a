"""Recursive-descent parser for `.trait` source files.

Grammar summary (comments `//` and `/* */` are skipped)::

    program    := (decl ";"?)*
    decl       := "Trait" IDENT "=" expr
                | "class" IDENT ":" expr
                | contract* type IDENT "(" params? ")" block
    method     := contract* modifier* type IDENT "(" params? ")" (";" | block)
    modifier   := "abstract" | "private"
    contract   := ("@requires" | "@ensures" | "@hidden_ensures") "(" expr ")"
    stmt       := type IDENT "=" expr ";" | "return" expr ";" | "if" "(" expr ")" stmt
    adaptation := "rename" sigRef "->" sigRef ("," ...)* | "hide" sigRef ("," sigRef)*

Operator precedence, loosest first: ``||``, ``&&``, comparisons
(non-associative), ``+ -``, ``* / %``, ``**`` (right associative), unary
``- !``, postfix call/adaptation. A minus sign directly before an integer
literal is folded into the literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .nodes import (
    BASE_TYPES, PRIVATE, PUBLIC, Adapt, Binary, BoolLit, Call, ClassDecl, Contract,
    Expr, FunDecl, Hide, If, IntLit, LocalDecl, MethodDecl, New, Param, Program,
    Rename, Return, SigRef, Signature, Span, StrLit, This, TraitDecl, TraitLit,
    Unary, Var,
)

KEYWORDS = {
    "Trait", "class", "abstract", "private", "return", "if", "new", "this",
    "true", "false", "rename", "hide", "Int", "Bool", "String",
}
TYPE_KEYWORDS = set(BASE_TYPES)
CONTRACT_KINDS = {"@requires", "@ensures", "@hidden_ensures"}
COMPARISONS = {"==", "!=", "<", "<=", ">", ">="}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<annot>@[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>\*\*|->|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\],;:.])
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, string, op, annot, eof
    text: str
    line: int
    col: int
    end_line: int
    end_col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            bad = source[pos]
            if source.startswith("/*", pos):
                raise ParseError(Span(file, line, col, line, col + 2), "unterminated block comment", ["*/"])
            if bad == '"':
                raise ParseError(Span(file, line, col, line, col + 1), "unterminated string literal", ['"'])
            raise ParseError(Span(file, line, col, line, col + 1), f"unexpected character {bad!r}")
        text = m.group()
        kind = m.lastgroup
        newlines = text.count("\n")
        if newlines:
            end_line = line + newlines
            end_col = len(text) - text.rfind("\n")
        else:
            end_line, end_col = line, col + len(text)
        if kind not in ("ws", "line_comment", "block_comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, text, line, col, end_line, end_col))
        pos = m.end()
        line, col = end_line, end_col
    tokens.append(Token("eof", "", line, col, line, col))
    return tokens


def _unescape(raw: str) -> str:
    out = []
    i = 0
    body = raw[1:-1]
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class Parser:
    def __init__(self, source: str, file: str = "<input>"):
        self.file = file
        self.tokens = tokenize(source, file)
        self.pos = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword", "annot") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, expected, message: Optional[str] = None):
        t = self.tok
        expected = list(expected)
        if message is None:
            message = f"expected {' or '.join(expected)}, found {t.describe()}"
        raise ParseError(Span(self.file, t.line, t.col, t.end_line, t.end_col), message, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error([repr(text)])
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.error([what])
        return self.advance()

    def span_from(self, start: Token) -> Span:
        last = self.tokens[self.pos - 1] if self.pos > 0 else start
        return Span(self.file, start.line, start.col, last.end_line, last.end_col)

    # -- program level

    def parse_program(self) -> Program:
        decls = []
        while self.tok.kind != "eof":
            if self.at(";"):
                self.advance()
                continue
            decls.append(self.parse_decl())
        return Program(tuple(decls))

    def parse_decl(self):
        start = self.tok
        if self.at("Trait") and self.peek().kind == "ident" and self.peek(2).text == "=":
            self.advance()
            name = self.advance().text
            self.expect("=")
            init = self.parse_expr()
            return TraitDecl(name, init, span=self.span_from(start))
        if self.at("class") and self.peek().kind == "ident":
            self.advance()
            name = self.advance().text
            self.expect(":")
            init = self.parse_expr()
            return ClassDecl(name, init, span=self.span_from(start))
        if self.at(*CONTRACT_KINDS) or self.at(*TYPE_KEYWORDS):
            contract = self.parse_contracts()
            sig = self.parse_signature()
            body = self.parse_block()
            return FunDecl(contract, sig, body, span=self.span_from(start))
        self.error(["'Trait'", "'class'", "contract", "type"],
                   f"expected a declaration, found {self.tok.describe()}")

    def parse_contracts(self) -> Contract:
        req, ens, hid = [], [], []
        while self.at(*CONTRACT_KINDS):
            kind = self.advance().text
            self.expect("(")
            e = self.parse_expr()
            self.expect(")")
            {"@requires": req, "@ensures": ens, "@hidden_ensures": hid}[kind].append(e)
        if self.tok.kind == "annot":
            self.error(sorted(CONTRACT_KINDS), f"unknown annotation {self.tok.text}")
        return Contract(tuple(req), tuple(ens), tuple(hid))

    def parse_type(self):
        if not self.at(*TYPE_KEYWORDS):
            self.error(["type"])
        return BASE_TYPES[self.advance().text]

    def parse_signature(self) -> Signature:
        start = self.tok
        ret = self.parse_type()
        name = self.expect_ident("method name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pstart = self.tok
                ptype = self.parse_type()
                pname = self.expect_ident("parameter name").text
                params.append(Param(pname, ptype, span=self.span_from(pstart)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return Signature(name, tuple(params), ret, span=self.span_from(start))

    def parse_method(self) -> MethodDecl:
        start = self.tok
        contract = self.parse_contracts()
        abstract = private = False
        while self.at("abstract", "private"):
            if self.advance().text == "abstract":
                abstract = True
            else:
                private = True
        sig = self.parse_signature()
        if self.at(";"):
            self.advance()
            body = None
        elif self.at("{"):
            body = self.parse_block()
        else:
            self.error(["'{'", "';'"])
        return MethodDecl(
            sig, contract, body, PRIVATE if private else PUBLIC,
            marked_abstract=abstract, span=self.span_from(start),
        )

    def parse_block(self):
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error(["'}'"])
            stmts.append(self.parse_stmt())
        self.advance()
        return tuple(stmts)

    def parse_stmt(self, nested: bool = False):
        start = self.tok
        if self.at("return"):
            self.advance()
            value = self.parse_expr()
            self.expect(";")
            return Return(value, span=self.span_from(start))
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt(nested=True)
            return If(cond, then, span=self.span_from(start))
        if self.at(*TYPE_KEYWORDS):
            if nested:
                self.error(["'return'", "'if'"], "a declaration cannot be the branch of an if")
            ty = self.parse_type()
            name = self.expect_ident("variable name").text
            self.expect("=")
            init = self.parse_expr()
            self.expect(";")
            return LocalDecl(ty, name, init, span=self.span_from(start))
        self.error(["'return'", "'if'", "type"])

    # -- expressions

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def _binary_level(self, ops, next_level):
        start = self.tok
        lhs = next_level()
        while self.at(*ops):
            op = self.advance().text
            rhs = next_level()
            lhs = Binary(op, lhs, rhs, span=self.span_from(start))
        return lhs

    def parse_or(self):
        return self._binary_level(("||",), self.parse_and)

    def parse_and(self):
        return self._binary_level(("&&",), self.parse_cmp)

    def parse_cmp(self):
        start = self.tok
        lhs = self.parse_add()
        if self.at(*COMPARISONS):
            op = self.advance().text
            rhs = self.parse_add()
            lhs = Binary(op, lhs, rhs, span=self.span_from(start))
            if self.at(*COMPARISONS):
                self.error(["')'", "';'"], "comparison operators do not chain; add parentheses")
        return lhs

    def parse_add(self):
        return self._binary_level(("+", "-"), self.parse_mul)

    def parse_mul(self):
        return self._binary_level(("*", "/", "%"), self.parse_power)

    def parse_power(self):
        start = self.tok
        base = self.parse_unary()
        if self.at("**"):
            self.advance()
            exponent = self.parse_power()
            return Binary("**", base, exponent, span=self.span_from(start))
        return base

    def parse_unary(self):
        start = self.tok
        if self.at("-", "!"):
            op = self.advance().text
            literal = op == "-" and self.tok.kind == "int"
            operand = self.parse_unary()
            if literal and isinstance(operand, IntLit):
                return IntLit(-operand.value, span=self.span_from(start))
            return Unary(op, operand, span=self.span_from(start))
        return self.parse_postfix()

    def parse_postfix(self):
        start = self.tok
        e = self.parse_primary()
        while True:
            if self.at("."):
                self.advance()
                name = self.expect_ident("method name").text
                args = self.parse_args()
                e = Call(e, name, args, span=self.span_from(start))
            elif self.at("["):
                self.advance()
                adaptation = self.parse_adaptation()
                self.expect("]")
                e = Adapt(e, adaptation, span=self.span_from(start))
            else:
                return e

    def parse_args(self):
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return tuple(args)

    def parse_primary(self):
        start = self.tok
        t = self.tok
        if t.kind == "int":
            self.advance()
            return IntLit(int(t.text), span=self.span_from(start))
        if t.kind == "string":
            self.advance()
            return StrLit(_unescape(t.text), span=self.span_from(start))
        if self.at("true", "false"):
            self.advance()
            return BoolLit(t.text == "true", span=self.span_from(start))
        if self.at("this"):
            self.advance()
            return This(span=self.span_from(start))
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("new"):
            self.advance()
            name = self.expect_ident("class name").text
            self.expect("(")
            self.expect(")")
            return New(name, span=self.span_from(start))
        if self.at("class"):
            self.advance()
            self.expect("{")
            methods = []
            while not self.at("}"):
                if self.tok.kind == "eof":
                    self.error(["'}'"])
                methods.append(self.parse_method())
            self.advance()
            return TraitLit(tuple(methods), span=self.span_from(start))
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                args = self.parse_args()
                return Call(None, t.text, args, span=self.span_from(start))
            return Var(t.text, span=self.span_from(start))
        self.error(["expression"], f"expected an expression, found {t.describe()}")

    def parse_sigref(self) -> SigRef:
        start = self.tok
        name = self.expect_ident("method name").text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                params.append(self.expect_ident("parameter name").text)
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return SigRef(name, tuple(params), span=self.span_from(start))

    def parse_adaptation(self):
        start = self.tok
        if self.at("rename"):
            self.advance()
            mappings = []
            while True:
                src = self.parse_sigref()
                self.expect("->")
                dst = self.parse_sigref()
                mappings.append((src, dst))
                if not self.at(","):
                    break
                self.advance()
            return Rename(tuple(mappings), span=self.span_from(start))
        if self.at("hide"):
            self.advance()
            refs = [self.parse_sigref()]
            while self.at(","):
                self.advance()
                refs.append(self.parse_sigref())
            return Hide(tuple(refs), span=self.span_from(start))
        self.error(["'rename'", "'hide'"])


def parse_program(source: str, file: str = "<input>") -> Program:
    return Parser(source, file).parse_program()


def parse_expr(source: str, file: str = "<expr>") -> Expr:
    p = Parser(source, file)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return e


def parse_trait(source: str, file: str = "<trait>"):
    """Parse a single trait literal (`class { ... }`) into a TraitValue."""
    from .nodes import TraitValue

    e = parse_expr(source, file)
    if not isinstance(e, TraitLit):
        raise ParseError(e.span or Span(file, 1, 1, 1, 1), "expected a trait literal", ["'class'"])
    return TraitValue.of(e.methods)
