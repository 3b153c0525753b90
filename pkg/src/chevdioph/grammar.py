"""Abstract syntax for group words and the parser for word expressions.

Group expressions: variables, ``v^-1`` (and integer powers), generator
literals ``x(<root>;<param>)``, ``w(...)``, ``h(...)``, commutators
``[a, b]``, parenthesized groups, the identity ``1`` and products written
with ``*`` or by juxtaposition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .polys import Poly
from .syntax import Scanner, Token, parse_ring_expr


@dataclass(frozen=True)
class Lit:
    kind: str  # "x", "w" or "h"
    root: str  # root text as written (canonicalized by the printer)
    param: Poly  # ring expression over ring constants


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Comm:
    left: object
    right: object


@dataclass(frozen=True)
class One:
    pass


LITERAL_KINDS = ("x", "w", "h")


def parse_group_expr(sc: Scanner, is_var, resolve_const) -> object:
    """Parse a product of factors.

    ``is_var(name)`` says whether an identifier is a declared group variable;
    ``resolve_const(token)`` resolves identifiers inside literal parameters.
    """

    def starts_factor(tok: Token) -> bool:
        if tok.kind == "ident":
            return True
        if tok.kind == "int" and tok.text == "1":
            return True
        return tok.kind == "punct" and tok.text in "[("

    def product():
        factors = [power()]
        while True:
            if sc.accept("*"):
                factors.append(power())
            elif starts_factor(sc.peek()):
                factors.append(power())
            else:
                break
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def power():
        base = atom()
        while sc.accept("^"):
            neg = bool(sc.accept("-"))
            tok = sc.next()
            if tok.kind != "int":
                raise sc.error("expected an integer exponent", tok)
            base = Pow(base, -int(tok.text) if neg else int(tok.text))
        return base

    def atom():
        tok = sc.peek()
        if tok.kind == "int" and tok.text == "1":
            sc.next()
            return One()
        if tok.kind == "punct" and tok.text == "[":
            sc.next()
            left = product()
            sc.expect(",")
            right = product()
            sc.expect("]")
            return Comm(left, right)
        if tok.kind == "punct" and tok.text == "(":
            sc.next()
            inner = product()
            sc.expect(")")
            return inner
        if tok.kind == "ident":
            sc.next()
            if tok.text in LITERAL_KINDS and not is_var(tok.text):
                nxt = sc.peek()
                if nxt.kind == "punct" and nxt.text == "(":
                    sc.next()
                    root_text, _ = sc.read_raw_until(";")
                    sc.pos += 1  # consume ';'
                    if not root_text:
                        raise ParseError("missing root in generator literal", tok.line, tok.col)
                    param = parse_ring_expr(sc, resolve_const)
                    sc.expect(")")
                    return Lit(tok.text, root_text, param)
            if is_var(tok.text):
                return Var(tok.text)
            raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.col)
        raise sc.error(f"expected a group expression, found {tok.text or 'end of input'!r}", tok)

    return product()


def format_group_expr(node, root_fmt=lambda r: r) -> str:
    if isinstance(node, One):
        return "1"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Lit):
        return f"{node.kind}({root_fmt(node.root)};{node.param})"
    if isinstance(node, Pow):
        inner = format_group_expr(node.base, root_fmt)
        if isinstance(node.base, (Mul, Pow)):
            inner = f"({inner})"
        return f"{inner}^{node.exp}"
    if isinstance(node, Comm):
        return f"[{format_group_expr(node.left, root_fmt)}, {format_group_expr(node.right, root_fmt)}]"
    if isinstance(node, Mul):
        parts = []
        for f in node.factors:
            text = format_group_expr(f, root_fmt)
            parts.append(f"({text})" if isinstance(f, Mul) else text)
        return " * ".join(parts)
    raise TypeError(node)


def variables_of(node) -> list:
    out: list = []

    def walk(n):
        if isinstance(n, Var):
            if n.name not in out:
                out.append(n.name)
        elif isinstance(n, Pow):
            walk(n.base)
        elif isinstance(n, Comm):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Mul):
            for f in n.factors:
                walk(f)

    walk(node)
    return out


def parse_word_text(text: str, variables=(), constants=()) -> object:
    sc = Scanner(text)
    consts = set(constants)

    def resolve(tok):
        if tok.text in consts:
            return Poly.var(tok.text)
        raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.col)

    node = parse_group_expr(sc, lambda n: n in variables, resolve)
    tok = sc.peek()
    if tok.kind != "eof":
        raise sc.error(f"unexpected {tok.text!r}", tok)
    return node
