"""Recursive-descent parser for the ASCII MITL syntax.

Grammar (precedence low to high; U is right-associative):

    until   := or ( 'U' interval? until )?
    or      := and ( '|' and )*
    and     := unary ( '&' unary )*
    unary   := '!' unary | ('X'|'F'|'G') interval? unary | primary
    primary := IDENT | 'true' | 'false' | '(' until ')'
    interval := ('['|'(') NUMBER ',' (NUMBER|'inf') (']'|')')

``X F G U true false inf`` are reserved words; any other identifier is an
atomic proposition. Errors carry the byte offset and the token set that
would have been accepted.
"""

from __future__ import annotations

import math
import re

from ..errors import FormulaSyntaxError
from .formula import (
    FALSE,
    TRUE,
    UNBOUNDED,
    Always,
    Atom,
    Formula,
    Future,
    Interval,
    Next,
    Until,
    f_and,
    f_not,
    f_or,
)

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[!&|()\[\],]))"
)
_RESERVED = {"X", "F", "G", "U", "true", "false", "inf"}


class _Token:
    __slots__ = ("kind", "value", "offset")

    def __init__(self, kind, value, offset):
        self.kind = kind  # 'num' | 'ident' | symbol itself | 'end'
        self.value = value
        self.offset = offset


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            off = len(src) - len(stripped)
            raise FormulaSyntaxError(f"unexpected character {stripped[0]!r}", off)
        if m.group("num") is not None:
            tokens.append(_Token("num", float(m.group("num")), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        else:
            sym = m.group("sym")
            tokens.append(_Token(sym, sym, m.start("sym")))
        pos = m.end()
    tokens.append(_Token("end", None, len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(f"unexpected {self._describe(tok)}", tok.offset, (what,))
        return self.take()

    @staticmethod
    def _describe(tok: _Token) -> str:
        if tok.kind == "end":
            return "end of input"
        return f"token {str(tok.value)!r}"

    # -- grammar -----------------------------------------------------------

    def parse(self) -> Formula:
        f = self.until()
        tok = self.peek()
        if tok.kind != "end":
            raise FormulaSyntaxError(
                f"unexpected {self._describe(tok)}", tok.offset, ("operator", "end of input")
            )
        return f

    def until(self) -> Formula:
        left = self.or_expr()
        tok = self.peek()
        if tok.kind == "ident" and tok.value == "U":
            self.take()
            interval = self.maybe_interval()
            right = self.until()
            return Until(left, right, interval)
        return left

    def or_expr(self) -> Formula:
        parts = [self.and_expr()]
        while self.peek().kind == "|":
            self.take()
            parts.append(self.and_expr())
        return parts[0] if len(parts) == 1 else f_or(parts)

    def and_expr(self) -> Formula:
        parts = [self.unary()]
        while self.peek().kind == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else f_and(parts)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.take()
            return f_not(self.unary())
        if tok.kind == "ident" and tok.value in ("X", "F", "G"):
            self.take()
            interval = self.maybe_interval()
            child = self.unary()
            cls = {"X": Next, "F": Future, "G": Always}[tok.value]
            return cls(child, interval)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            self.take()
            f = self.until()
            self.expect(")", "')'")
            return f
        if tok.kind == "ident":
            if tok.value == "true":
                self.take()
                return TRUE
            if tok.value == "false":
                self.take()
                return FALSE
            if tok.value in _RESERVED:
                raise FormulaSyntaxError(
                    f"reserved word {tok.value!r} cannot be an atom", tok.offset, ("atom", "'('")
                )
            self.take()
            return Atom(tok.value)
        raise FormulaSyntaxError(
            f"unexpected {self._describe(tok)}", tok.offset, ("atom", "'!'", "'('", "'X' 'F' 'G'")
        )

    def maybe_interval(self):
        tok = self.peek()
        if tok.kind == "[":
            return self.interval(lo_open=False)
        if tok.kind == "(" and self.peek(1).kind == "num":
            return self.interval(lo_open=True)
        return UNBOUNDED

    def interval(self, lo_open: bool) -> Interval:
        start = self.take()  # '[' or '('
        lo_tok = self.expect("num", "number")
        self.expect(",", "','")
        hi_tok = self.peek()
        if hi_tok.kind == "num":
            hi = self.take().value
        elif hi_tok.kind == "ident" and hi_tok.value == "inf":
            self.take()
            hi = math.inf
        else:
            raise FormulaSyntaxError(
                f"unexpected {self._describe(hi_tok)}", hi_tok.offset, ("number", "'inf'")
            )
        close = self.peek()
        if close.kind not in ("]", ")"):
            raise FormulaSyntaxError(
                f"unexpected {self._describe(close)}", close.offset, ("']'", "')'")
            )
        self.take()
        hi_open = close.kind == ")"
        try:
            return Interval(lo_tok.value, hi, lo_open, hi_open)
        except ValueError as exc:
            raise FormulaSyntaxError(str(exc), start.offset) from None


def parse(src: str) -> Formula:
    """Parse formula text into a canonical AST."""
    return _Parser(src).parse()
