"""Recursive-descent parser for the expression language.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom
    atom   := INTEGER | DECIMAL | NAME '(' expr ')' | '(' expr ')'

``a - b`` parses as ``Add(a, Neg(b))`` and ``a / b`` as ``Mul(a, Inv(b))``.
Numeric literals become exact rationals; ``1.25`` is ``5/4``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import ExprSyntaxError, SourceSpan
from .expr import DERIVED, FUNCTIONS, Add, Const, Expr, Inv, Mul, Neg, rewrite_derived

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d[\d.]*)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<punct>[-+*/()])
""", re.VERBOSE)
_DECIMAL = re.compile(r"\d+(?:\.\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}",
                                  SourceSpan(pos, pos + 1))
        kind = m.lastgroup
        span = SourceSpan(m.start(), m.end())
        if kind == "number" and not _DECIMAL.fullmatch(m.group()):
            raise ExprSyntaxError(f"malformed number literal {m.group()!r}", span)
        if kind != "ws":
            tokens.append(Token(kind, m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(len(text), len(text))))
    return tokens


def _literal(text: str) -> mpq:
    whole, _, frac = text.partition(".")
    return mpq(int(whole + frac), 10 ** len(frac))


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.tok.span)
        return self.advance()

    def expr(self) -> Expr:
        start = self.tok.span.start
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            span = SourceSpan(start, rhs.span.end)
            if op == "-":
                rhs = Neg(rhs, span=rhs.span)
            node = Add(node, rhs, span=span)
        return node

    def term(self) -> Expr:
        start = self.tok.span.start
        node = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            rhs = self.factor()
            span = SourceSpan(start, rhs.span.end)
            if op == "/":
                rhs = Inv(rhs, span=rhs.span)
            node = Mul(node, rhs, span=span)
        return node

    def factor(self) -> Expr:
        if self.tok.text == "-":
            start = self.advance().span.start
            arg = self.factor()
            return Neg(arg, span=SourceSpan(start, arg.span.end))
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Const(_literal(tok.text), span=tok.span)
        if tok.kind == "name":
            name = tok.text
            if name not in FUNCTIONS and name not in DERIVED:
                raise ExprSyntaxError(f"unknown identifier {name!r}", tok.span)
            self.advance()
            self.expect("(")
            arg = self.expr()
            end = self.expect(")").span.end
            span = SourceSpan(tok.span.start, end)
            if name in DERIVED:
                return rewrite_derived(name, arg, span)
            return FUNCTIONS[name](arg, span=span)
        if tok.text == "(":
            start = self.advance().span.start
            inner = self.expr()
            end = self.expect(")").span.end
            # widen the span so diagnostics quote the whole group
            return dataclasses.replace(inner, span=SourceSpan(start, end))
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.span)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree; raises ExprSyntaxError."""
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "eof":
        raise ExprSyntaxError(f"unexpected {p.tok.text!r} after expression", p.tok.span)
    return node
