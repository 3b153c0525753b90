"""Sparse multivariate polynomials over the integers.

Monomials are tuples of ``(variable, exponent)`` pairs sorted by variable
name, so polynomials over different variable sets combine freely.  Terms are
listed in graded-lexicographic order: higher total degree first, ties broken
lexicographically on the exponent vector over the sorted variable names.
"""

from __future__ import annotations

from functools import total_ordering
from typing import Callable, Iterable, Mapping

Monomial = tuple  # tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_str(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


@total_ordering
class Poly:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    # construction helpers
    @staticmethod
    def const(c: int) -> "Poly":
        return Poly({(): c})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): 1})

    @staticmethod
    def monomial(coeff: int, **exps: int) -> "Poly":
        return Poly({tuple(sorted((v, e) for v, e in exps.items() if e)): coeff})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, int):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Poly")

    # inspection
    @property
    def terms(self) -> dict:
        return self._terms

    def sorted_terms(self) -> list:
        names = sorted(self.variables())

        def key(item):
            m = dict(item[0])
            return (-_mono_degree(item[0]), tuple(-m.get(v, 0) for v in names))

        return sorted(self._terms.items(), key=key)

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((), 0)

    def coefficient(self, **exps: int) -> int:
        return self._terms.get(tuple(sorted((v, e) for v, e in exps.items() if e)), 0)

    # arithmetic
    def __add__(self, other):
        other = Poly.coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        other = Poly.coerce(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __lt__(self, other):
        return self.sort_key() < Poly.coerce(other).sort_key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sort_key(self):
        return tuple((m, c) for m, c in self.sorted_terms())

    # evaluation
    def evaluate(self, values: Mapping[str, object], add: Callable, mul: Callable,
                 from_int: Callable):
        """Evaluate in an arbitrary commutative ring given by its operations."""
        total = from_int(0)
        for m, c in self._terms.items():
            term = from_int(c)
            for v, e in m:
                x = values[v]
                for _ in range(e):
                    term = mul(term, x)
            total = add(total, term)
        return total

    def eval_int(self, values: Mapping[str, int]) -> int:
        return self.evaluate(values, lambda a, b: a + b, lambda a, b: a * b, int)

    def substitute(self, values: Mapping[str, "Poly"]) -> "Poly":
        return self.evaluate(
            {v: Poly.coerce(values.get(v, Poly.var(v))) for v in self.variables()},
            lambda a, b: a + b,
            lambda a, b: a * b,
            Poly.const,
        )

    def __repr__(self):
        return f"Poly({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not m:
                body = str(a)
            elif a == 1:
                body = mono_str(m)
            else:
                body = f"{a}*{mono_str(m)}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)


def poly_sum(items: Iterable[Poly]) -> Poly:
    out = Poly()
    for p in items:
        out = out + p
    return out
