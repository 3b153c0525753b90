"""Indecomposable reduced root systems of rank 2..8 and their Weyl groups.

Roots are stored in the usual Euclidean realizations with every coordinate
multiplied by 2, so half-integral roots of E8 and F4 become integers.  All
pairings are ratios of inner products, hence unaffected by the scaling.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import CapExceeded, IllegalRank, ParseError

LEGAL_RANKS = {
    "A": lambda l: l >= 2,
    "B": lambda l: l >= 2,
    "C": lambda l: l >= 2,
    "D": lambda l: l >= 4,
    "E": lambda l: l in (6, 7, 8),
    "F": lambda l: l == 4,
    "G": lambda l: l == 2,
}


@dataclass(frozen=True, order=True)
class RootSystemId:
    family: str
    rank: int

    def __post_init__(self):
        legal = LEGAL_RANKS.get(self.family)
        if legal is None or not legal(self.rank):
            raise IllegalRank(f"{self.family}{self.rank} is not a legal indecomposable root system")

    @classmethod
    def parse(cls, text: str) -> "RootSystemId":
        m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", text)
        if not m:
            raise IllegalRank(f"cannot parse root system name {text!r}")
        return cls(m.group(1).upper(), int(m.group(2)))

    def __str__(self):
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class Root:
    coords: tuple  # doubled Euclidean coordinates
    height: int
    coefficients: tuple = field(compare=False)  # simple-root coefficients

    @property
    def is_positive(self) -> bool:
        return self.height > 0

    def __repr__(self):
        return f"Root({format_coords(self.coords)})"


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _unit(n, i, scale=2):
    v = [0] * n
    v[i] = scale
    return v


def _vec_add(*vs):
    return tuple(sum(xs) for xs in zip(*vs))


def _vec_scale(c, v):
    return tuple(c * x for x in v)


def _signed_pairs(n, idx=None):
    """Doubled vectors +-e_i +- e_j for i<j among idx."""
    idx = range(n) if idx is None else idx
    out = []
    for i, j in itertools.combinations(idx, 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * n
            v[i], v[j] = 2 * si, 2 * sj
            out.append(tuple(v))
    return out


def _raw_system(family: str, l: int):
    """Return (dimension, all root vectors, simple roots), doubled coordinates."""
    if family == "A":
        n = l + 1
        roots = [tuple(_vec_add(_unit(n, i), _vec_scale(-1, _unit(n, j))))
                 for i in range(n) for j in range(n) if i != j]
        simple = [tuple(_vec_add(_unit(n, i), _vec_scale(-1, _unit(n, i + 1)))) for i in range(l)]
        return n, roots, simple
    if family in "BCD":
        n = l
        roots = _signed_pairs(n)
        if family == "B":
            roots += [tuple(_vec_scale(s, _unit(n, i))) for i in range(n) for s in (1, -1)]
        if family == "C":
            roots += [tuple(_vec_scale(2 * s, _unit(n, i))) for i in range(n) for s in (1, -1)]
        simple = [tuple(_vec_add(_unit(n, i), _vec_scale(-1, _unit(n, i + 1)))) for i in range(l - 1)]
        if family == "B":
            simple.append(tuple(_unit(n, l - 1)))
        elif family == "C":
            simple.append(tuple(_unit(n, l - 1, 4)))
        else:
            simple.append(tuple(_vec_add(_unit(n, l - 2), _unit(n, l - 1))))
        return n, roots, simple
    if family == "F":
        n = 4
        roots = _signed_pairs(n)
        roots += [tuple(_vec_scale(s, _unit(n, i))) for i in range(n) for s in (1, -1)]
        roots += [tuple(signs) for signs in itertools.product((1, -1), repeat=4)]
        simple = [(0, 2, -2, 0), (0, 0, 2, -2), (0, 0, 0, 2), (1, -1, -1, -1)]
        return n, roots, simple
    if family == "G":
        n = 3
        short = [tuple(_vec_add(_unit(n, i), _vec_scale(-1, _unit(n, j))))
                 for i in range(n) for j in range(n) if i != j]
        long_ = []
        for i in range(n):
            v = [2] * n
            v[i] = -4
            long_ += [tuple(v), tuple(-x for x in v)]
        simple = [(2, -2, 0), (-4, 2, 2)]
        return n, short + long_, simple
    if family == "E":
        n = 8
        roots = _signed_pairs(n)
        roots += [signs for signs in itertools.product((1, -1), repeat=8)
                  if sum(1 for s in signs if s < 0) % 2 == 0]
        simple = [(1, -1, -1, -1, -1, -1, -1, 1), (2, 2, 0, 0, 0, 0, 0, 0)]
        simple += [tuple(_vec_add(_unit(n, i + 1), _vec_scale(-1, _unit(n, i)))) for i in range(6)]
        return n, roots, simple[:l]
    raise IllegalRank(family)


def _solve_coefficients(simple, vec):
    """Exact coordinates of vec in the basis ``simple`` (None if outside the span)."""
    l = len(simple)
    gram = [[Fraction(_dot(a, b)) for b in simple] for a in simple]
    rhs = [Fraction(_dot(a, vec)) for a in simple]
    m = [row + [r] for row, r in zip(gram, rhs)]
    for col in range(l):
        piv = next(r for r in range(col, l) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(l):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    coeffs = [m[i][l] for i in range(l)]
    back = tuple(sum(c * s[k] for c, s in zip(coeffs, simple)) for k in range(len(vec)))
    if back != tuple(vec):
        return None
    if any(c.denominator != 1 for c in coeffs):
        return None
    return tuple(int(c) for c in coeffs)


class RootSystem:
    """A root system with a fixed base and the height-then-lex root order."""

    def __init__(self, rid: RootSystemId):
        self.id = rid
        dim, vectors, simple = _raw_system(rid.family, rid.rank)
        self.dim = dim
        roots = []
        for v in set(vectors):
            coeffs = _solve_coefficients(simple, v)
            if coeffs is None:
                continue  # E6/E7 keep only the roots inside the span of their base
            if not (all(c >= 0 for c in coeffs) or all(c <= 0 for c in coeffs)):
                raise AssertionError(f"{v} is neither positive nor negative")
            roots.append(Root(tuple(v), sum(coeffs), coeffs))
        pos = sorted((r for r in roots if r.height > 0), key=lambda r: (r.height, r.coords))
        neg_by_coords = {r.coords: r for r in roots if r.height < 0}
        self.positive_roots: tuple = tuple(pos)
        self.negative_roots: tuple = tuple(neg_by_coords[_vec_scale(-1, r.coords)] for r in pos)
        self.all_roots: tuple = self.positive_roots + self.negative_roots
        self._by_coords = {r.coords: r for r in self.all_roots}
        self._index = {r.coords: i for i, r in enumerate(self.all_roots)}
        self.simple_roots: tuple = tuple(self._by_coords[tuple(s)] for s in simple)
        self.m = len(pos)
        self.rank = rid.rank

    # lookup helpers
    def __str__(self):
        return str(self.id)

    def __repr__(self):
        return f"RootSystem({self.id})"

    def __iter__(self):
        return iter(self.all_roots)

    def __len__(self):
        return len(self.all_roots)

    def index(self, root: Root) -> int:
        return self._index[root.coords]

    def get(self, coords) -> Root | None:
        return self._by_coords.get(tuple(coords))

    def is_root(self, coords) -> bool:
        return tuple(coords) in self._by_coords

    def neg(self, a: Root) -> Root:
        return self._by_coords[_vec_scale(-1, a.coords)]

    def combine(self, i: int, a: Root, j: int, b: Root) -> Root | None:
        """The root i*a + j*b, or None if it is not a root."""
        return self._by_coords.get(_vec_add(_vec_scale(i, a.coords), _vec_scale(j, b.coords)))

    def add(self, a: Root, b: Root) -> Root | None:
        return self.combine(1, a, 1, b)

    def length_sq(self, a: Root) -> int:
        return _dot(a.coords, a.coords)

    def is_long(self, a: Root) -> bool:
        return self.length_sq(a) == self.max_length_sq

    @cached_property
    def max_length_sq(self) -> int:
        return max(self.length_sq(r) for r in self.all_roots)

    @cached_property
    def highest_root(self) -> Root:
        return self.positive_roots[-1]

    def from_coefficients(self, coeffs) -> Root | None:
        vec = tuple(sum(c * s.coords[k] for c, s in zip(coeffs, self.simple_roots))
                    for k in range(self.dim))
        return self.get(vec)

    # naming
    def name(self, root: Root) -> str:
        """Name as an integer combination of simple roots, e.g. ``a1+2a2``."""
        parts = []
        for i, c in enumerate(root.coefficients):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign}{mag}a{i + 1}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text

    def parse_root(self, text: str) -> Root:
        root = self.get(parse_root_vector(text, self))
        if root is None:
            raise ParseError(f"{text!r} is not a root of {self.id}", 1, 1)
        return root


def format_coords(coords) -> str:
    """Undoubled coordinate syntax, e.g. ``[1,-1,0]`` or ``[1/2,-1/2,...]``."""
    out = []
    for x in coords:
        out.append(str(x // 2) if x % 2 == 0 else f"{x}/2")
    return "[" + ",".join(out) + "]"


_TERM = re.compile(r"([+-]?)(\d*)([ae])(\d+)")


def parse_root_vector(text: str, rs: RootSystem) -> tuple:
    """Parse ``a1+a2``, ``2e1``, ``e1-e2`` or ``[1,-1,0]`` into doubled coords."""
    s = text.replace(" ", "")
    if s.startswith("["):
        if not s.endswith("]"):
            raise ParseError(f"unterminated coordinate list {text!r}", 1, 1)
        try:
            vals = [Fraction(x) for x in s[1:-1].split(",")]
        except ValueError:
            raise ParseError(f"bad coordinate list {text!r}", 1, 1) from None
        if len(vals) != rs.dim or any((2 * v).denominator != 1 for v in vals):
            raise ParseError(f"coordinate list {text!r} does not fit {rs.id}", 1, 1)
        return tuple(int(2 * v) for v in vals)
    pos = 0
    vec = [0] * rs.dim
    if not s:
        raise ParseError("empty root name", 1, 1)
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m:
            raise ParseError(f"bad root name {text!r}", 1, pos + 1)
        sign = -1 if m.group(1) == "-" else 1
        if pos > 0 and not m.group(1):
            raise ParseError(f"bad root name {text!r}", 1, pos + 1)
        coef = sign * (int(m.group(2)) if m.group(2) else 1)
        k = int(m.group(4)) - 1
        if m.group(3) == "a":
            if not 0 <= k < rs.rank:
                raise ParseError(f"no simple root a{k + 1} in {rs.id}", 1, pos + 1)
            vec = [v + coef * c for v, c in zip(vec, rs.simple_roots[k].coords)]
        else:
            if not 0 <= k < rs.dim:
                raise ParseError(f"no basis vector e{k + 1} in {rs.id}", 1, pos + 1)
            vec[k] += 2 * coef
        pos = m.end()
    return tuple(vec)


@lru_cache(maxsize=None)
def build_root_system(rid) -> RootSystem:
    if isinstance(rid, str):
        rid = RootSystemId.parse(rid)
    return RootSystem(rid)


def cartan_pairing(a: Root, b: Root) -> int:
    """<a, b> = 2(a,b)/(b,b)."""
    num = 2 * _dot(a.coords, b.coords)
    den = _dot(b.coords, b.coords)
    if num % den:
        raise AssertionError("non-integral Cartan pairing")
    return num // den


def reflect(rs: RootSystem, a: Root, b: Root) -> Root:
    """w_a(b) = b - <b,a> a."""
    return rs.combine(1, b, -cartan_pairing(b, a), a)


def highest_root(rs: RootSystem) -> Root:
    return rs.highest_root


@dataclass(frozen=True)
class WeylElement:
    perm: tuple  # perm[k] = index of w(root_k)
    reduced_word: tuple  # simple-reflection indices (0-based); w = s_{i1} ... s_{ik}

    @property
    def length(self) -> int:
        return len(self.reduced_word)

    def apply(self, rs: RootSystem, root: Root) -> Root:
        return rs.all_roots[self.perm[rs.index(root)]]


@lru_cache(maxsize=None)
def simple_reflection_perms(rs: RootSystem) -> tuple:
    return tuple(tuple(rs.index(reflect(rs, s, r)) for r in rs.all_roots) for s in rs.simple_roots)


def generate_weyl(rs: RootSystem, cap: int = 100_000) -> list[WeylElement]:
    """Closure of the simple reflections by breadth-first search.

    Elements come out in order of length, so every stored word is reduced.
    """
    gens = simple_reflection_perms(rs)
    identity = tuple(range(len(rs)))
    seen = {identity: ()}
    queue = deque([identity])
    while queue:
        p = queue.popleft()
        word = seen[p]
        for i, s in enumerate(gens):
            q = tuple(s[k] for k in p)
            if q not in seen:
                seen[q] = (i,) + word
                if len(seen) > cap:
                    raise CapExceeded(f"Weyl group of {rs.id} exceeds {cap} elements")
                queue.append(q)
    return [WeylElement(p, w) for p, w in seen.items()]


def weyl_from_word(rs: RootSystem, word) -> WeylElement:
    gens = simple_reflection_perms(rs)
    p = tuple(range(len(rs)))
    for i in reversed(word):
        p = tuple(gens[i][k] for k in p)
    return WeylElement(p, tuple(word))
