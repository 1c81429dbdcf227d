"""Recursive-descent parser for the expression mini-language.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ['^' exponent]
    exponent := ['+'|'-'] atom          (must fold to a constant)
    atom   := number | ident | '(' expr ')' | func '(' expr ')' | '-' atom
    func   := 'exp' | 'log' | 'sqrt' | 'sin' | 'cos'
    ident  := 'x' digits                (1-based)

Whitespace is ignored. ``sqrt(e)`` desugars to ``e^0.5``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import nodes
from .nodes import Expr

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)

_FUNCS = {
    "exp": nodes.exp,
    "log": nodes.log,
    "sqrt": nodes.sqrt,
    "sin": nodes.sin,
    "cos": nodes.cos,
}


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


@dataclass
class _Tok:
    kind: str  # number | ident | op | end
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            skip = len(rest) - len(rest.lstrip())
            bad = pos + skip
            raise ParseError(f"unexpected character {text[bad]!r}", _byte_offset(text, bad))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode("utf-8"))))
    return toks


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, n: int, param: str | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n
        self.param = param

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            raise ParseError(f"expected {op!r}, found {self._describe()}", self.tok.offset)

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "end" else repr(self.tok.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = nodes.add(e, self.term())
            elif self.accept("-"):
                e = nodes.sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = nodes.mul(e, self.factor())
            elif self.accept("/"):
                e = nodes.div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        base = self.atom()
        if not self.accept("^"):
            return base
        at = self.tok.offset
        if self.accept("-"):
            p = nodes.neg(self.atom())
        else:
            self.accept("+")
            p = self.atom()
        if not p.is_const:
            raise ParseError("exponent must be a constant", at)
        return nodes.power(base, p.value)

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.take()
            return nodes.const(float(t.text))
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "op" and t.text == "-":
            self.take()
            return nodes.neg(self.atom())
        if t.kind == "ident":
            self.take()
            if t.text in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[t.text](arg)
            return self.ident(t)
        raise ParseError(f"expected a number, variable or '(', found {self._describe()}", t.offset)

    def ident(self, t: _Tok) -> Expr:
        if self.param is not None and t.text == self.param:
            return nodes.var(1)
        m = re.fullmatch(r"x(\d+)", t.text)
        if m is None or self.param is not None:
            raise ParseError(f"unknown identifier {t.text!r}", t.offset)
        idx = int(m.group(1))
        if idx < 1:
            raise ParseError(f"variable index must start at 1, got {t.text!r}", t.offset)
        if idx > self.n:
            raise ParseError(f"variable {t.text!r} exceeds input dimension {self.n}", t.offset)
        return nodes.var(idx)


def parse(text: str, n: int) -> Expr:
    """Parse ``text`` as a scalar field in x1..xn."""
    if n < 0:
        raise ValueError("dimension must be non-negative")
    return _Parser(text, n, None).parse()


def parse_curve(text: str, param: str = "u") -> Expr:
    """Parse a one-parameter expression; ``param`` becomes variable 1."""
    return _Parser(text, 1, param).parse()
