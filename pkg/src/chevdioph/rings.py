"""Exact commutative rings: Z, Q, Z/n, GF(p^k) and Z[vars].

Ring elements are plain Python values in canonical form: ``int`` residues in
``[0, n)`` for Z/n, ``int`` codes ``sum c_i p^i`` for GF(p^k), ``int`` for Z,
``Fraction`` for Q and :class:`~chevdioph.polys.Poly` for Z[vars].  Finite
rings additionally expose vectorized numpy operations on arrays of codes,
which the group engine uses for batched matrix arithmetic.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .errors import (BadModulus, InfiniteRing, NonUnitParameter, NotLocal,
                     ParseError, ReducibleModulusPolynomial)
from .polys import Poly
from .syntax import Scanner, Token, parse_ring_expr


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class Ring:
    """Common interface.  Subclasses override the arithmetic."""

    name: str = "?"
    is_finite = False
    is_local = False
    is_field = False
    characteristic = 0

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_int(self, k: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def power(self, a, k: int):
        if k < 0:
            return self.power(self.inv(a), -k)
        result = self.one()
        while k:
            if k & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            k >>= 1
        return result

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def eq(self, a, b) -> bool:
        return a == b

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero())

    def elements(self) -> list:
        raise InfiniteRing(f"{self.name} is not finite")

    def units(self) -> list:
        return [a for a in self.elements() if self.is_unit(a)]

    @property
    def size(self) -> int:
        return len(self.elements())

    def format(self, a) -> str:
        return str(a)

    def constants(self) -> dict[str, object]:
        """Named constants usable in expressions (e.g. the generator of GF(q))."""
        return {}

    def eval_poly(self, p: Poly, values: dict):
        return p.evaluate(values, self.add, self.mul, self.from_int)

    def parse(self, text: str):
        sc = Scanner(text)
        consts = self.constants()

        def resolve(tok: Token) -> Poly:
            if tok.text in consts:
                return Poly.var(tok.text)
            raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.col)

        p = parse_ring_expr(sc, resolve)
        tok = sc.peek()
        if tok.kind == "punct" and tok.text == "/" and isinstance(self, RationalField):
            sc.next()
            q = parse_ring_expr(sc, resolve)
            return self.div(self.eval_poly(p, consts), self.eval_poly(q, consts))
        if tok.kind != "eof":
            raise sc.error(f"unexpected {tok.text!r}", tok)
        return self.eval_poly(p, consts)

    def radical_members(self) -> list:
        """Elements of the Jacobson radical (finite rings only)."""
        return [a for a in self.elements() if self._in_radical(a)]

    def _in_radical(self, a) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return f"Ring({self.name})"

    def __eq__(self, other):
        return isinstance(other, Ring) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    # vectorized operations (finite rings only)
    def vfrom_ints(self, arr):
        raise InfiniteRing(f"{self.name} has no vectorized form")


class IntegerRing(Ring):
    name = "Z"

    def from_int(self, k):
        return int(k)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if a not in (1, -1):
            raise NonUnitParameter(f"{a} is not a unit in Z")
        return a


class RationalField(Ring):
    name = "Q"
    is_local = True
    is_field = True

    def from_int(self, k):
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NonUnitParameter("0 is not a unit in Q")
        return 1 / Fraction(a)

    def format(self, a):
        return str(Fraction(a))

    def _in_radical(self, a):
        return a == 0


class PolynomialRing(Ring):
    """Z[vars]; units are the constants +-1."""

    def __init__(self, variables):
        self.variables = tuple(variables)
        self.name = f"ZPoly[{','.join(self.variables)}]"

    def from_int(self, k):
        return Poly.const(int(k))

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_unit(self, a):
        return a.is_constant() and a.constant_term() in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitParameter(f"{a} is not a unit in {self.name}")
        return a

    def gen(self, name: str) -> Poly:
        return Poly.var(name)

    def constants(self):
        return {v: Poly.var(v) for v in self.variables}

    def eval_poly(self, p, values):
        return p.substitute(values)


class FiniteRing(Ring):
    is_finite = True

    @cached_property
    def _elements(self) -> list:
        return list(range(self.order))

    def elements(self):
        return list(self._elements)

    @cached_property
    def _unit_list(self):
        return [a for a in self._elements if self.is_unit(a)]

    def units(self):
        return list(self._unit_list)

    @property
    def size(self):
        return self.order

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))


class IntegersModN(FiniteRing):
    def __init__(self, n: int):
        if n < 2:
            raise BadModulus(f"modulus must be at least 2, got {n}")
        self.n = n
        self.order = n
        self.name = f"Z/{n}"
        self.factors = factorize(n)
        self.is_local = len(self.factors) == 1
        self.is_field = self.is_local and next(iter(self.factors.values())) == 1
        self.characteristic = n
        self._rad = 1
        for p in self.factors:
            self._rad *= p

    def from_int(self, k):
        return int(k) % self.n

    def add(self, a, b):
        return (a + b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def is_unit(self, a):
        from math import gcd
        return gcd(a, self.n) == 1

    def inv(self, a):
        try:
            return pow(a, -1, self.n)
        except ValueError:
            raise NonUnitParameter(f"{a} is not a unit in {self.name}") from None

    def _in_radical(self, a):
        return a % self._rad == 0

    @property
    def radical_generator(self) -> int:
        return self._rad

    def vfrom_ints(self, arr):
        return np.asarray(arr, dtype=np.int64) % self.n

    def vadd(self, a, b):
        return (a + b) % self.n

    def vneg(self, a):
        return (-a) % self.n

    def vmul(self, a, b):
        return (a * b) % self.n

    def vmatmul(self, a, b):
        return np.matmul(a, b) % self.n


def _poly_mulmod(a, b, f, p):
    """Multiply coefficient lists (low degree first) modulo monic f over GF(p)."""
    k = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * f[i]) % p
    out = prod[:k] + [0] * (k - len(prod[:k]))
    return out


def _poly_divides(g, f, p) -> bool:
    """Whether monic g divides f over GF(p) (coefficient lists, low first)."""
    r = list(f)
    dg = len(g) - 1
    for d in range(len(r) - 1, dg - 1, -1):
        c = r[d] % p
        if c:
            for i in range(dg + 1):
                r[d - dg + i] = (r[d - dg + i] - c * g[i]) % p
    return all(x % p == 0 for x in r[:dg])


def is_irreducible(f, p) -> bool:
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if _poly_divides(list(tail) + [1], f, p):
                return False
    return True


def _is_primitive(f, p) -> bool:
    k = len(f) - 1
    q = p ** k
    x = [0, 1] + [0] * (k - 2) if k > 1 else [0]
    if k == 1:
        # x is the constant -f0 in GF(p)
        g = (-f[0]) % p
        return g != 0 and all(pow(g, (q - 1) // r, p) != 1 for r in factorize(q - 1))
    one = [1] + [0] * (k - 1)

    def power(base, e):
        result = one
        while e:
            if e & 1:
                result = _poly_mulmod(result, base, f, p)
            base = _poly_mulmod(base, base, f, p)
            e >>= 1
        return result

    return all(power(x, (q - 1) // r) != one for r in factorize(q - 1))


@lru_cache(maxsize=None)
def default_modulus(p: int, k: int) -> tuple:
    """First primitive monic irreducible of degree k, coefficients low first.

    Candidates are scanned with the coefficient tuple read from the degree
    k-1 coefficient down to the constant term, in lexicographic order.
    """
    for tail in itertools.product(range(p), repeat=k):
        coeffs = list(reversed(tail)) + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p) and _is_primitive(coeffs, p):
            return tuple(coeffs)
    raise ReducibleModulusPolynomial(f"no primitive polynomial of degree {k} over GF({p})")


class GaloisField(FiniteRing):
    """GF(p^k) as GF(p)[x]/(f); the class of x is the named constant ``g``."""

    is_local = True
    is_field = True

    def __init__(self, p: int, k: int = 1, modulus=None, explicit=False):
        if p < 2 or len(factorize(p)) != 1 or factorize(p)[p] != 1:
            raise BadModulus(f"{p} is not prime")
        if k < 1:
            raise BadModulus("extension degree must be positive")
        if modulus is None:
            modulus = default_modulus(p, k) if k > 1 else (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ReducibleModulusPolynomial("modulus must be monic of the stated degree")
        if k > 1 and not is_irreducible(list(modulus), p):
            raise ReducibleModulusPolynomial(f"{modulus} is reducible over GF({p})")
        self.p, self.k, self.modulus = p, k, modulus
        self.order = p ** k
        self.characteristic = p
        q = self.order
        if explicit:
            f = " + ".join(_coeff_term(c, i, "x") for i, c in reversed(list(enumerate(modulus))) if c)
            self.name = f"GF({p}^{k};f={f.replace(' ', '')})"
        else:
            self.name = f"GF({q})"
        coeffs = [self._decode(a) for a in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = self._encode([(x + y) % p for x, y in zip(coeffs[a], coeffs[b])])
                mul[a, b] = self._encode(_poly_mulmod(coeffs[a], coeffs[b], list(modulus), p)
                                         if k > 1 else [(coeffs[a][0] * coeffs[b][0]) % p])
        self.add_table, self.mul_table = add, mul
        self.neg_table = np.array([self._encode([(-x) % p for x in coeffs[a]]) for a in range(q)],
                                  dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv_table = inv

    def _decode(self, code: int) -> list:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return out

    def _encode(self, coeffs) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + c
        return code

    def from_int(self, k):
        return int(k) % self.p

    def add(self, a, b):
        return int(self.add_table[a, b])

    def neg(self, a):
        return int(self.neg_table[a])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NonUnitParameter(f"0 is not a unit in {self.name}")
        return int(self.inv_table[a])

    def _in_radical(self, a):
        return a == 0

    def constants(self):
        return {"g": self.p} if self.k > 1 else {}

    def format(self, a):
        if self.k == 1:
            return str(a)
        coeffs = self._decode(a)
        terms = [_coeff_term(c, i, "g") for i, c in reversed(list(enumerate(coeffs))) if c]
        return " + ".join(terms) if terms else "0"

    def vfrom_ints(self, arr):
        return np.asarray(arr, dtype=np.int64) % self.p

    def vadd(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.k == 1:
            return (a + b) % self.p
        return self.add_table[a, b]

    def vneg(self, a):
        if self.k == 1:
            return (-a) % self.p
        return self.neg_table[a]

    def vmul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        return self.mul_table[a, b]

    def vmatmul(self, a, b):
        if self.k == 1:
            return np.matmul(a, b) % self.p
        prods = self.mul_table[a[..., :, :, None], b[..., None, :, :]]
        if self.p == 2:
            return np.bitwise_xor.reduce(prods, axis=-2)
        acc = prods[..., 0, :]
        for i in range(1, prods.shape[-2]):
            acc = self.add_table[acc, prods[..., i, :]]
        return acc


def _coeff_term(c, i, var):
    if i == 0:
        return str(c)
    mono = var if i == 1 else f"{var}^{i}"
    return mono if c == 1 else f"{c}*{mono}"


_RING_RE = {
    "modn": re.compile(r"^Z/(\d+)$"),
    "gf": re.compile(r"^GF\((\d+)\)$"),
    "gfpk": re.compile(r"^GF\((\d+)\^(\d+)(?:;f=(.+))?\)$"),
    "poly": re.compile(r"^ZPoly\[([A-Za-z_][\w,\s]*)\]$"),
}


@dataclass(frozen=True)
class RingSpec:
    """Parsed form of a ring name such as "GF(4)" or "Z/6"."""

    kind: str  # "Z", "Q", "ModN", "GF", "PolyZ"
    n: int = 0
    p: int = 0
    k: int = 1
    modulus: tuple | None = None
    variables: tuple = ()


def parse_ring_spec(text: str) -> RingSpec:
    s = text.strip().replace(" ", "")
    if s == "Z":
        return RingSpec("Z")
    if s == "Q":
        return RingSpec("Q")
    if m := _RING_RE["modn"].match(s):
        return RingSpec("ModN", n=int(m.group(1)))
    if m := _RING_RE["gf"].match(s):
        q = int(m.group(1))
        f = factorize(q)
        if len(f) != 1:
            raise BadModulus(f"{q} is not a prime power")
        (p, k), = f.items()
        return RingSpec("GF", p=p, k=k)
    if m := _RING_RE["gfpk"].match(s):
        p, k = int(m.group(1)), int(m.group(2))
        modulus = None
        if m.group(3):
            from .syntax import parse_poly_text
            poly = parse_poly_text(m.group(3), variables={"x"})
            coeffs = [0] * (k + 1)
            for mono, c in poly.terms.items():
                e = dict(mono).get("x", 0)
                if e > k:
                    raise ReducibleModulusPolynomial("modulus degree exceeds the stated degree")
                coeffs[e] = c % p
            modulus = tuple(coeffs)
        return RingSpec("GF", p=p, k=k, modulus=modulus)
    if m := _RING_RE["poly"].match(s):
        names = tuple(v for v in m.group(1).split(",") if v)
        return RingSpec("PolyZ", variables=names)
    raise ParseError(f"unrecognized ring {text!r}", 1, 1)


_RING_CACHE: dict = {}


def make_ring(spec) -> Ring:
    """Build (and memoize) a ring from a :class:`RingSpec` or spec string."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, str):
        spec = parse_ring_spec(spec)
    if spec in _RING_CACHE:
        return _RING_CACHE[spec]
    if spec.kind == "Z":
        ring = IntegerRing()
    elif spec.kind == "Q":
        ring = RationalField()
    elif spec.kind == "ModN":
        ring = IntegersModN(spec.n)
    elif spec.kind == "GF":
        ring = GaloisField(spec.p, spec.k, spec.modulus, explicit=spec.modulus is not None)
    elif spec.kind == "PolyZ":
        ring = PolynomialRing(spec.variables)
    else:
        raise ParseError(f"unknown ring kind {spec.kind}", 1, 1)
    _RING_CACHE[spec] = ring
    return ring


def enumerate_ring(ring: Ring) -> list:
    """All elements in canonical order (residues / field codes ascending)."""
    if not ring.is_finite:
        raise InfiniteRing(f"{ring.name} is not finite")
    return ring.elements()


def radical_membership(ring: Ring, a) -> bool:
    """Whether ``a`` lies in the unique maximal ideal of a local ring."""
    if not ring.is_local:
        raise NotLocal(f"{ring.name} is not local")
    if ring.is_field:
        return ring.is_zero(a)
    return ring._in_radical(a)


@dataclass(frozen=True)
class CRTSplit:
    factors: tuple  # tuple of IntegersModN
    source: IntegersModN

    def project(self, a: int) -> tuple:
        return tuple(a % f.n for f in self.factors)

    @property
    def projections(self) -> list[Callable]:
        return [lambda a, f=f: a % f.n for f in self.factors]

    def combine(self, residues) -> int:
        n = self.source.n
        total = 0
        for r, f in zip(residues, self.factors):
            m = n // f.n
            total += r * m * pow(m, -1, f.n)
        return total % n


def crt_split(ring: Ring) -> CRTSplit:
    """Split Z/n into its local factors Z/p^k (ascending prime order)."""
    if not isinstance(ring, IntegersModN):
        raise BadModulus(f"CRT splitting needs Z/n, got {ring.name}")
    factors = tuple(make_ring(f"Z/{p ** e}") for p, e in sorted(ring.factors.items()))
    return CRTSplit(factors, ring)
