"""Chevalley bases, integral representations and commutator coefficients.

Structure constants are fixed by declaring ``N(a, b) = +(p+1)`` on every
extraspecial pair and propagating through the standard identities between
structure constants.  Representations are built from matrices for the simple
root elements and their negatives; all remaining root elements are obtained
by bracketing along extraspecial pairs, so every representation shares the
same signs as the structure-constant table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import KindMismatch, ParseError, PeelFailure, UnknownConvention
from .matpoly import MatPoly
from .polys import Poly
from .rootsys import (Root, RootSystem, build_root_system, cartan_pairing,
                      format_coords)

CONVENTIONS = ("extraspecial-v1",)
DEFAULT_CONVENTION = "extraspecial-v1"
KINDS = ("adjoint", "naturalSL", "naturalSp")
KIND_ALIASES = {"adjoint": "adjoint", "ad": "adjoint", "adj": "adjoint",
                "naturalSL": "naturalSL", "sl": "naturalSL", "SL": "naturalSL",
                "naturalSp": "naturalSp", "sp": "naturalSp", "Sp": "naturalSp"}


def _dot(a: Root, b: Root) -> int:
    return sum(x * y for x, y in zip(a.coords, b.coords))


def string_down(rs: RootSystem, a: Root, b: Root) -> int:
    """p = max{k : b - k a is a root}."""
    p = 0
    while rs.combine(1, b, -(p + 1), a) is not None:
        p += 1
    return p


@dataclass(frozen=True)
class ChevalleyBasisTable:
    rs: RootSystem
    convention: str
    N: dict  # (index a, index b) -> int, defined iff a+b is a root
    coroot_coefficients: dict  # index a -> coefficients of h_a over the simple coroots
    extraspecial: dict = field(default_factory=dict)  # index of xi -> (index a, index b)

    def n(self, a: Root, b: Root) -> int | None:
        return self.N.get((self.rs.index(a), self.rs.index(b)))


def _coroot_coefficients(rs: RootSystem, a: Root) -> tuple:
    la = _dot(a, a)
    out = []
    for c, s in zip(a.coefficients, rs.simple_roots):
        v = Fraction(c * _dot(s, s), la)
        assert v.denominator == 1
        out.append(int(v))
    return tuple(out)


def _structure_constants(rs: RootSystem):
    pos_order = {r.coords: i for i, r in enumerate(rs.positive_roots)}
    extraspecial = {}
    for xi in rs.positive_roots:
        for a in rs.positive_roots:
            b = rs.combine(1, xi, -1, a)
            if b is not None and b.is_positive and pos_order[a.coords] < pos_order[b.coords]:
                extraspecial[xi.coords] = (a, b)
                break
    memo: dict = {}

    def sq(r):
        return _dot(r, r)

    def n(a: Root, b: Root) -> int:
        key = (a.coords, b.coords)
        if key in memo:
            return memo[key]
        c = rs.add(a, b)
        if c is None:
            raise KeyError("a + b is not a root")
        if a.is_positive and b.is_positive:
            if pos_order[a.coords] > pos_order[b.coords]:
                val = -n(b, a)
            else:
                ea, eb = extraspecial[c.coords]
                if ea == a:
                    val = string_down(rs, a, b) + 1
                else:
                    # four-root identity applied to (ea, eb, -a, -b)
                    total = Fraction(0)
                    na, nb = rs.neg(a), rs.neg(b)
                    if rs.add(eb, na) is not None:
                        total += Fraction(n(eb, na) * n(ea, nb), sq(rs.add(eb, na)))
                    if rs.add(ea, na) is not None:
                        total += Fraction(n(na, ea) * n(eb, nb), sq(rs.add(ea, na)))
                    neg_val = -Fraction(sq(c), n(ea, eb)) * total
                    val = -neg_val
                    assert val.denominator == 1
                    val = int(val)
        elif not a.is_positive and not b.is_positive:
            val = -n(rs.neg(a), rs.neg(b))
        else:
            g = rs.neg(c)
            # N(a,b)/(g,g) = N(b,g)/(a,a) = N(g,a)/(b,b); recurse on the same-sign pair
            if a.is_positive == g.is_positive:
                val = Fraction(sq(g), sq(b)) * n(g, a)
            else:
                val = Fraction(sq(g), sq(a)) * n(b, g)
            assert val.denominator == 1
            val = int(val)
        memo[key] = val
        return val

    table = {}
    for a in rs.all_roots:
        for b in rs.all_roots:
            if rs.add(a, b) is not None:
                table[(rs.index(a), rs.index(b))] = n(a, b)
    es = {rs.index(rs.get(k)): (rs.index(a), rs.index(b)) for k, (a, b) in extraspecial.items()}
    return table, es


@lru_cache(maxsize=None)
def _basis_cached(name: str, convention: str) -> ChevalleyBasisTable:
    rs = build_root_system(name)
    table, es = _structure_constants(rs)
    coroots = {rs.index(a): _coroot_coefficients(rs, a) for a in rs.all_roots}
    return ChevalleyBasisTable(rs, convention, table, coroots, es)


def build_chevalley_basis(rs: RootSystem, convention: str = DEFAULT_CONVENTION) -> ChevalleyBasisTable:
    if convention not in CONVENTIONS:
        raise UnknownConvention(f"unknown convention {convention!r}")
    return _basis_cached(str(rs.id), convention)


# --------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class Representation:
    rs: RootSystem
    kind: str
    dim: int
    weights: tuple  # doubled weight of each basis vector
    root_matrices: dict  # root index -> integer matrix pi(e_a)
    divided_powers: dict  # (root index, k) -> pi(e_a)^k / k!, k >= 0 up to nilpotency
    lattice: str  # "sc" or "ad"
    basis: ChevalleyBasisTable
    form: np.ndarray | None = None  # invariant bilinear form for naturalSp

    def e(self, a: Root) -> np.ndarray:
        return self.root_matrices[self.rs.index(a)]

    def powers(self, a: Root) -> list:
        i = self.rs.index(a)
        out = []
        k = 0
        while (i, k) in self.divided_powers:
            out.append(self.divided_powers[(i, k)])
            k += 1
        return out

    @property
    def label(self) -> str:
        return {"adjoint": "ad", "naturalSL": "sl", "naturalSp": "sp"}[self.kind]

    def __repr__(self):
        return f"Representation({self.rs.id}, {self.kind}, dim={self.dim})"


def _bracket(x, y):
    return x.dot(y) - y.dot(x)


def _exact_div(m: np.ndarray, d: int) -> np.ndarray:
    if np.any(m % d != 0):
        raise AssertionError("non-integral quotient in a Chevalley basis construction")
    return m // d


def _divided_powers(x: np.ndarray) -> list:
    out = [np.identity(x.shape[0], dtype=np.int64)]
    power = out[0]
    k = 0
    while True:
        k += 1
        power = power.dot(x)
        if not power.any():
            return out
        out.append(_exact_div(power, factorial(k)))


def _complete_from_simple(rs: RootSystem, basis: ChevalleyBasisTable, simple_pos, simple_neg):
    """Generate pi(e_a) for every root by bracketing along extraspecial pairs."""
    mats: dict = {}
    for s, x, y in zip(rs.simple_roots, simple_pos, simple_neg):
        mats[rs.index(s)] = np.asarray(x, dtype=np.int64)
        mats[rs.index(rs.neg(s))] = np.asarray(y, dtype=np.int64)
    for xi in rs.positive_roots:
        ix = rs.index(xi)
        if ix in mats:
            continue
        ia, ib = basis.extraspecial[ix]
        nab = basis.N[(ia, ib)]
        mats[ix] = _exact_div(_bracket(mats[ia], mats[ib]), nab)
        na, nb = rs.index(rs.neg(rs.all_roots[ia])), rs.index(rs.neg(rs.all_roots[ib]))
        mats[rs.index(rs.neg(xi))] = _exact_div(_bracket(mats[na], mats[nb]), basis.N[(na, nb)])
    return mats


def _adjoint_matrices(rs: RootSystem, basis: ChevalleyBasisTable):
    # basis order: positive roots by decreasing height, simple coroots, negative
    # roots by increasing depth; positive root elements are then upper triangular
    order = [("e", rs.index(r)) for r in reversed(rs.positive_roots)]
    order += [("h", i) for i in range(rs.rank)]
    order += [("e", rs.index(rs.neg(r))) for r in rs.positive_roots]
    pos = {b: k for k, b in enumerate(order)}
    dim = len(order)
    weights = []
    for kind, i in order:
        weights.append(rs.all_roots[i].coords if kind == "e" else (0,) * rs.dim)
    mats = {}
    for a in rs.all_roots:
        ia = rs.index(a)
        m = np.zeros((dim, dim), dtype=np.int64)
        for b in rs.all_roots:
            ib = rs.index(b)
            col = pos[("e", ib)]
            c = rs.add(a, b)
            if c is not None:
                m[pos[("e", rs.index(c))], col] = basis.N[(ia, ib)]
            elif b == rs.neg(a):
                for i, coef in enumerate(basis.coroot_coefficients[ia]):
                    m[pos[("h", i)], col] = coef
        for i, s in enumerate(rs.simple_roots):
            m[pos[("e", ia)], pos[("h", i)]] = -cartan_pairing(a, s)
        mats[ia] = m
    return dim, tuple(weights), mats


def _natural_sl(rs: RootSystem):
    n = rs.rank + 1
    pos, neg = [], []
    for i in range(rs.rank):
        x = np.zeros((n, n), dtype=np.int64)
        x[i, i + 1] = 1
        pos.append(x)
        neg.append(x.T.copy())
    weights = tuple(tuple(2 if j == i else 0 for j in range(n)) for i in range(n))
    return n, weights, pos, neg


def _natural_sp(rs: RootSystem):
    l = rs.rank
    n = 2 * l

    def idx(i, sign):  # basis index of the weight sign*e_i (i 0-based)
        return i if sign > 0 else n - 1 - i

    pos, neg = [], []
    for i in range(l - 1):
        x = np.zeros((n, n), dtype=np.int64)
        x[idx(i, 1), idx(i + 1, 1)] = 1
        x[idx(i + 1, -1), idx(i, -1)] = -1
        pos.append(x)
        neg.append(x.T.copy())
    x = np.zeros((n, n), dtype=np.int64)
    x[idx(l - 1, 1), idx(l - 1, -1)] = 1
    pos.append(x)
    neg.append(x.T.copy())
    weights = [None] * n
    for i in range(l):
        for sign in (1, -1):
            weights[idx(i, sign)] = tuple(2 * sign if j == i else 0 for j in range(l))
    form = np.zeros((n, n), dtype=np.int64)
    for i in range(l):
        form[idx(i, 1), idx(i, -1)] = 1
        form[idx(i, -1), idx(i, 1)] = -1
    return n, tuple(weights), pos, neg, form


def normalize_kind(kind: str) -> str:
    try:
        return KIND_ALIASES[kind]
    except KeyError:
        raise KindMismatch(f"unknown representation kind {kind!r}") from None


@lru_cache(maxsize=None)
def _rep_cached(name: str, kind: str, convention: str) -> Representation:
    rs = build_root_system(name)
    basis = build_chevalley_basis(rs, convention)
    form = None
    if kind == "adjoint":
        dim, weights, mats = _adjoint_matrices(rs, basis)
        lattice = "ad"
    elif kind == "naturalSL":
        if rs.id.family != "A":
            raise KindMismatch(f"naturalSL needs type A, got {rs.id}")
        dim, weights, pos, neg = _natural_sl(rs)
        mats = _complete_from_simple(rs, basis, pos, neg)
        lattice = "sc"
    elif kind == "naturalSp":
        if rs.id.family != "C":
            raise KindMismatch(f"naturalSp needs type C, got {rs.id}")
        dim, weights, pos, neg, form = _natural_sp(rs)
        mats = _complete_from_simple(rs, basis, pos, neg)
        lattice = "sc"
    else:
        raise KindMismatch(f"unknown representation kind {kind!r}")
    dp = {}
    for i, m in mats.items():
        for k, d in enumerate(_divided_powers(m)):
            dp[(i, k)] = d
    return Representation(rs, kind, dim, weights, mats, dp, lattice, basis, form)


def build_representation(rs: RootSystem, kind: str, convention: str = DEFAULT_CONVENTION) -> Representation:
    if convention not in CONVENTIONS:
        raise UnknownConvention(f"unknown convention {convention!r}")
    return _rep_cached(str(rs.id), normalize_kind(kind), convention)


def coroot_matrix(rep: Representation, a: Root) -> np.ndarray:
    return _bracket(rep.e(a), rep.e(rep.rs.neg(a)))


# --------------------------------------------------------------------------
# commutator coefficients


@dataclass(frozen=True)
class CommutatorTable:
    rs: RootSystem
    kind: str
    entries: dict  # (index a, index b) -> tuple of (i, j, c) in product order

    def get(self, a: Root, b: Root) -> tuple:
        return self.entries[(self.rs.index(a), self.rs.index(b))]


def symbolic_x(rep: Representation, a: Root, param: Poly, variables: tuple) -> MatPoly:
    pairs = [(param ** k, d) for k, d in enumerate(rep.powers(a))]
    return MatPoly.from_scaled(pairs, variables, rep.dim)


def commutator_candidates(rs: RootSystem, a: Root, b: Root) -> list:
    """(i, j, root) for i, j >= 1 with i a + j b a root, in product order."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            r = rs.combine(i, a, j, b)
            if r is not None:
                out.append((i, j, r))
    out.sort(key=lambda item: (item[2].height, item[0]))
    return out


def _read_scalar(diff: np.ndarray, e: np.ndarray) -> int:
    nz = np.argwhere(e != 0)
    r, c = nz[0]
    q = Fraction(int(diff[r, c]), int(e[r, c]))
    if q.denominator != 1 or not np.array_equal(diff, int(q) * e.astype(object)):
        raise PeelFailure("coefficient is not an integer multiple of the root element")
    return int(q)


def peel_commutator(rep: Representation, a: Root, b: Root) -> tuple:
    """Coefficients c_ij with [x_a(t), x_b(u)] = prod x_{ia+jb}(c_ij t^i u^j)."""
    rs = rep.rs
    tv, uv = Poly.var("t"), Poly.var("u")
    vars_ = ("t", "u")
    comm = (symbolic_x(rep, a, tv, vars_) * symbolic_x(rep, b, uv, vars_)
            * symbolic_x(rep, a, -tv, vars_) * symbolic_x(rep, b, -uv, vars_))
    cands = commutator_candidates(rs, a, b)
    coeffs = {k: 0 for k in range(len(cands))}

    def product():
        out = MatPoly.identity(rep.dim, vars_)
        for k, (i, j, r) in enumerate(cands):
            if coeffs[k]:
                out = out * symbolic_x(rep, r, coeffs[k] * tv ** i * uv ** j, vars_)
        return out

    # factors of lower total degree never receive contributions from products
    # of two or more factors, so solving by degree is triangular
    for k in sorted(range(len(cands)), key=lambda k: cands[k][0] + cands[k][1]):
        i, j, r = cands[k]
        diff = (comm - product()).coefficient((i, j))
        coeffs[k] = _read_scalar(diff, rep.e(r)) if diff.any() else 0
    if not (product() == comm):
        raise PeelFailure(f"residual is not the identity for ({rs.name(a)}, {rs.name(b)})")
    return tuple((i, j, coeffs[k]) for k, (i, j, _) in enumerate(cands) if coeffs[k])


@lru_cache(maxsize=None)
def _commtab_cached(name: str, kind: str, convention: str) -> CommutatorTable:
    rep = _rep_cached(name, kind, convention)
    rs = rep.rs
    entries = {}
    for a in rs.all_roots:
        for b in rs.all_roots:
            if a == b or a == rs.neg(b):
                continue
            entries[(rs.index(a), rs.index(b))] = peel_commutator(rep, a, b)
    return CommutatorTable(rs, kind, entries)


def derive_commutator_table(rep: Representation) -> CommutatorTable:
    return _commtab_cached(str(rep.rs.id), rep.kind, rep.basis.convention)


# --------------------------------------------------------------------------
# plain-text export / import


def export_table(basis: ChevalleyBasisTable, comm: CommutatorTable | None = None) -> str:
    rs = basis.rs
    lines = [f"chevtab v1 {rs.id} {basis.convention}"]
    for a in rs.all_roots:
        for b in rs.all_roots:
            v = basis.n(a, b)
            if v is not None:
                lines.append(f"N {format_coords(a.coords)} {format_coords(b.coords)} {v}")
    if comm is not None:
        for a in rs.all_roots:
            for b in rs.all_roots:
                for i, j, c in comm.entries.get((rs.index(a), rs.index(b)), ()):
                    lines.append(f"C {format_coords(a.coords)} {format_coords(b.coords)} {i} {j} {c}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ImportedTable:
    system: str
    convention: str
    N: dict  # (coords a, coords b) -> int
    C: dict  # (coords a, coords b) -> list of (i, j, c)


def import_table(text: str) -> ImportedTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty table", 1, 1)
    head = lines[0].split()
    if len(head) != 4 or head[:2] != ["chevtab", "v1"]:
        raise ParseError("missing 'chevtab v1' header", 1, 1)
    rs = build_root_system(head[2])
    from .rootsys import parse_root_vector
    n_part, c_part = {}, {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        try:
            a = parse_root_vector(parts[1], rs)
            b = parse_root_vector(parts[2], rs)
            if parts[0] == "N" and len(parts) == 4:
                n_part[(a, b)] = int(parts[3])
            elif parts[0] == "C" and len(parts) == 6:
                c_part.setdefault((a, b), []).append(tuple(int(x) for x in parts[3:]))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(f"malformed record {ln!r}", lineno, 1) from None
    return ImportedTable(str(rs.id), head[3], n_part, c_part)
