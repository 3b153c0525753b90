"""Character scanner and ring-expression parser shared by the text formats."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import ParseError
from .polys import Poly

PUNCT = set("+-*^()[],;=/")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "punct", "eof"
    text: str
    line: int
    col: int


class Scanner:
    """Tokenizer with 1-based line/column tracking and raw-slice access."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._peeked: Token | None = None

    def location(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, token: Token | None = None) -> ParseError:
        if token is not None:
            return ParseError(message, token.line, token.col)
        return ParseError(message, *self.location())

    def _skip(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self.pos += 1
            else:
                break

    def _lex(self) -> Token:
        self._skip()
        text = self.text
        line, col = self.location()
        if self.pos >= len(text):
            return Token("eof", "", line, col)
        ch = text[self.pos]
        start = self.pos
        if ch.isdigit():
            while self.pos < len(text) and text[self.pos].isdigit():
                self.pos += 1
            return Token("int", text[start:self.pos], line, col)
        if ch.isalpha() or ch == "_":
            while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] in "_'"):
                self.pos += 1
            return Token("ident", text[start:self.pos], line, col)
        if ch in PUNCT:
            self.pos += 1
            return Token("punct", ch, line, col)
        raise ParseError(f"unexpected character {ch!r}", line, col)

    def peek(self) -> Token:
        if self._peeked is None:
            self._peeked = self._lex()
        return self._peeked

    def next(self) -> Token:
        tok = self.peek()
        self._peeked = None
        return tok

    def accept(self, text: str) -> Token | None:
        tok = self.peek()
        if tok.kind in ("punct", "ident") and tok.text == text:
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind in ("punct", "ident") and tok.text == text:
            return self.next()
        raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)

    def read_raw_until(self, stops: str) -> tuple[str, Token]:
        """Return raw text up to (not including) the first char in ``stops``."""
        if self._peeked is not None:
            self.pos = self._position_of(self._peeked)
            self._peeked = None
        self._skip()
        line, col = self.location()
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in "[(":
                depth += 1
            elif ch in "])":
                depth -= 1
            elif ch in stops and depth == 0:
                break
            self.pos += 1
        if self.pos >= len(self.text):
            raise ParseError(f"expected one of {stops!r}", line, col)
        return self.text[start:self.pos].strip(), Token("raw", self.text[start:self.pos], line, col)

    def _position_of(self, tok: Token) -> int:
        # translate (line, col) back to an absolute offset
        offset = 0
        for _ in range(tok.line - 1):
            offset = self.text.index("\n", offset) + 1
        return offset + tok.col - 1


def parse_ring_expr(sc: Scanner, resolve: Callable[[Token], Poly]) -> Poly:
    """Parse ``+ - * ^`` expressions over integers and identifiers.

    ``resolve`` maps an identifier token to a polynomial (a variable or a
    ring constant) and raises for unknown names.
    """

    def expr() -> Poly:
        if sc.accept("-"):
            acc = -term()
        else:
            sc.accept("+")
            acc = term()
        while True:
            if sc.accept("+"):
                acc = acc + term()
            elif sc.accept("-"):
                acc = acc - term()
            else:
                return acc

    def term() -> Poly:
        acc = factor()
        while sc.accept("*"):
            acc = acc * factor()
        return acc

    def factor() -> Poly:
        base = atom()
        if sc.accept("^"):
            tok = sc.next()
            if tok.kind != "int":
                raise sc.error("expected a nonnegative integer exponent", tok)
            return base ** int(tok.text)
        return base

    def atom() -> Poly:
        tok = sc.peek()
        if tok.kind == "int":
            sc.next()
            return Poly.const(int(tok.text))
        if tok.kind == "ident":
            sc.next()
            return resolve(tok)
        if sc.accept("("):
            inner = expr()
            sc.expect(")")
            return inner
        if sc.accept("-"):
            return -atom()
        raise sc.error(f"expected an expression, found {tok.text or 'end of input'!r}", tok)

    return expr()


def parse_poly_text(text: str, variables=None) -> Poly:
    """Parse a standalone polynomial; ``variables`` restricts the allowed names."""
    sc = Scanner(text)

    def resolve(tok: Token) -> Poly:
        if variables is not None and tok.text not in variables:
            raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.col)
        return Poly.var(tok.text)

    p = parse_ring_expr(sc, resolve)
    tok = sc.peek()
    if tok.kind != "eof":
        raise sc.error(f"unexpected {tok.text!r}", tok)
    return p
