"""Matrices over Z[vars] stored as polynomials with integer matrix coefficients.

``MatPoly({(2, 1): A, (0, 0): I}, ("t", "u"))`` is ``A t^2 u + I``.  This
layout turns a product of symbolic matrices into a convolution of integer
matrix products, which is far cheaper than entrywise sparse polynomials.
"""

from __future__ import annotations

import numpy as np

from .polys import Poly


def _zero_matrix(n):
    return np.zeros((n, n), dtype=object)


class MatPoly:
    __slots__ = ("terms", "variables", "n")

    def __init__(self, terms: dict, variables: tuple, n: int):
        self.variables = tuple(variables)
        self.n = n
        self.terms = {e: m for e, m in terms.items() if np.any(m != 0)}

    @classmethod
    def identity(cls, n: int, variables: tuple) -> "MatPoly":
        return cls({(0,) * len(variables): np.identity(n, dtype=object)}, variables, n)

    @classmethod
    def from_scaled(cls, pairs, variables: tuple, n: int) -> "MatPoly":
        """Sum of ``poly * integer_matrix`` over the given pairs."""
        terms: dict = {}
        for poly, mat in pairs:
            mat = np.asarray(mat, dtype=object)
            for mono, c in Poly.coerce(poly).terms.items():
                exps = dict(mono)
                if set(exps) - set(variables):
                    raise ValueError(f"variables {set(exps) - set(variables)} not in {variables}")
                key = tuple(exps.get(v, 0) for v in variables)
                terms[key] = terms.get(key, _zero_matrix(n)) + c * mat
        return cls(terms, variables, n)

    def __mul__(self, other: "MatPoly") -> "MatPoly":
        out: dict = {}
        for e1, a in self.terms.items():
            for e2, b in other.terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                prod = a.dot(b)
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        return MatPoly(out, self.variables, self.n)

    def __add__(self, other: "MatPoly") -> "MatPoly":
        out = dict(self.terms)
        for e, m in other.terms.items():
            out[e] = out[e] + m if e in out else m
        return MatPoly(out, self.variables, self.n)

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + other.scale(-1)

    def scale(self, c: int) -> "MatPoly":
        return MatPoly({e: c * m for e, m in self.terms.items()}, self.variables, self.n)

    def __eq__(self, other):
        if not isinstance(other, MatPoly):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(np.array_equal(m, other.terms[e]) for e, m in self.terms.items())

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(sorted((e, tuple(int(x) for x in m.flat)) for e, m in self.terms.items()))

    def coefficient(self, exps: tuple) -> np.ndarray:
        m = self.terms.get(tuple(exps))
        return _zero_matrix(self.n) if m is None else m

    def is_identity(self) -> bool:
        return self == MatPoly.identity(self.n, self.variables)

    def nilpotent_inverse(self) -> "MatPoly | None":
        """Inverse of I + N for nilpotent N, or None when N is not nilpotent."""
        ident = MatPoly.identity(self.n, self.variables)
        nil = self - ident
        result = ident
        power = ident
        for _ in range(self.n + 1):
            power = power * nil.scale(-1)
            if not power.terms:
                return result
            result = result + power
        return None

    def entry(self, r: int, c: int) -> Poly:
        terms = {}
        for e, m in self.terms.items():
            if m[r, c]:
                terms[tuple(sorted((v, k) for v, k in zip(self.variables, e) if k))] = int(m[r, c])
        return Poly(terms)

    def to_rows(self) -> list:
        return [[self.entry(r, c) for c in range(self.n)] for r in range(self.n)]
