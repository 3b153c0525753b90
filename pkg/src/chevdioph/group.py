"""Chevalley group elements as exact matrices over a ring.

A :class:`GroupContext` binds a root system, a representation and a ring.
Matrices live in one of three backends: numpy code arrays for finite rings,
matrix-coefficient polynomials for Z[vars], and object arrays for Z and Q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from .chevalley import Representation, build_representation, normalize_kind
from .errors import CapExceeded, ChevDiophError, NonUnitParameter, UnknownSymbol
from .grammar import Comm, Lit, Mul, One, Pow, Var, parse_word_text
from .matpoly import MatPoly
from .polys import Poly
from .rings import PolynomialRing, Ring, make_ring
from .rootsys import Root, RootSystem, build_root_system, cartan_pairing, reflect

DEFAULT_CAP = 2_000_000


# --------------------------------------------------------------------------
# matrix backends


class FiniteBackend:
    """Matrices of ring codes as int64 numpy arrays."""

    def __init__(self, ring: Ring, n: int):
        self.ring, self.n = ring, n
        self._ident = ring.vfrom_ints(np.identity(n, dtype=np.int64))

    def identity(self):
        return self._ident

    def combine(self, pairs):
        ring = self.ring
        acc = np.zeros((self.n, self.n), dtype=np.int64)
        for scalar, mat in pairs:
            if scalar == ring.zero():
                continue
            term = ring.vmul(np.full((self.n, self.n), scalar, dtype=np.int64), ring.vfrom_ints(mat))
            acc = ring.vadd(acc, term)
        return acc

    def mul(self, a, b):
        return self.ring.vmatmul(a, b)

    def key(self, a):
        return a.astype(np.uint8).tobytes() if self.ring.size <= 256 else a.tobytes()

    def rows(self, a):
        return [[int(x) for x in row] for row in a]

    def from_rows(self, rows):
        return np.array(rows, dtype=np.int64).reshape(self.n, self.n)


class ObjectBackend:
    """Object arrays of exact scalars (Python ints or Fractions)."""

    def __init__(self, ring: Ring, n: int):
        self.ring, self.n = ring, n

    def identity(self):
        m = np.empty((self.n, self.n), dtype=object)
        for r in range(self.n):
            for c in range(self.n):
                m[r, c] = self.ring.from_int(1 if r == c else 0)
        return m

    def combine(self, pairs):
        acc = np.vectorize(self.ring.from_int, otypes=[object])(np.zeros((self.n, self.n), dtype=np.int64))
        for scalar, mat in pairs:
            acc = acc + scalar * np.asarray(mat, dtype=object)
        return acc

    def mul(self, a, b):
        return a.dot(b)

    def key(self, a):
        return tuple(self.ring.from_int(0) + x for x in a.flat)

    def rows(self, a):
        return [list(row) for row in a]

    def from_rows(self, rows):
        m = np.empty((self.n, self.n), dtype=object)
        for r, row in enumerate(rows):
            for c, x in enumerate(row):
                m[r, c] = x
        return m


class SymbolicBackend:
    """Matrices over Z[vars] as :class:`MatPoly`."""

    def __init__(self, ring: PolynomialRing, n: int):
        self.ring, self.n = ring, n
        self.variables = ring.variables

    def identity(self):
        return MatPoly.identity(self.n, self.variables)

    def combine(self, pairs):
        return MatPoly.from_scaled(pairs, self.variables, self.n)

    def mul(self, a, b):
        return a * b

    def key(self, a):
        return a.key()

    def rows(self, a):
        return a.to_rows()

    def from_rows(self, rows):
        pairs = []
        for r, row in enumerate(rows):
            for c, x in enumerate(row):
                e = np.zeros((self.n, self.n), dtype=np.int64)
                e[r, c] = 1
                pairs.append((x, e))
        return MatPoly.from_scaled(pairs, self.variables, self.n)


def _make_backend(ring: Ring, n: int):
    if ring.is_finite:
        return FiniteBackend(ring, n)
    if isinstance(ring, PolynomialRing):
        return SymbolicBackend(ring, n)
    return ObjectBackend(ring, n)


# --------------------------------------------------------------------------
# elements and contexts


@dataclass(frozen=True, eq=False)
class GroupElement:
    ctx: "GroupContext"
    mat: object
    inv_mat: object = field(default=None, compare=False)

    @cached_property
    def key(self):
        return self.ctx.backend.key(self.mat)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __mul__(self, other):
        return self.ctx.multiply(self, other)

    def rows(self):
        return self.ctx.backend.rows(self.mat)

    def is_identity(self) -> bool:
        return self == self.ctx.identity()

    def __repr__(self):
        return f"GroupElement({self.ctx.format_rows(self)})"


class GroupContext:
    def __init__(self, rs: RootSystem, rep: Representation, ring: Ring):
        if rep.rs is not rs:
            raise ChevDiophError("representation belongs to another root system")
        self.rs, self.rep, self.ring = rs, rep, ring
        self.dim = rep.dim
        self.backend = _make_backend(ring, rep.dim)
        self._x_one = {}

    @property
    def name(self) -> str:
        return f"{self.rs.id} {self.rep.label} {self.ring.name}"

    def __repr__(self):
        return f"GroupContext({self.name})"

    # constructors
    def identity(self) -> GroupElement:
        ident = self.backend.identity()
        return GroupElement(self, ident, ident)

    def element(self, mat) -> GroupElement:
        return GroupElement(self, mat)

    def from_rows(self, rows) -> GroupElement:
        return GroupElement(self, self.backend.from_rows(rows))

    def root(self, r) -> Root:
        if isinstance(r, Root):
            return r
        return self.rs.parse_root(r)

    def _coerce(self, t):
        if isinstance(t, str):
            return self.ring.parse(t)
        if isinstance(t, int) and not isinstance(self.ring, PolynomialRing):
            if self.ring.is_finite and 0 <= t < self.ring.size:
                return t  # already a canonical value (field elements are codes)
            return self.ring.from_int(t)
        if isinstance(t, int):
            return Poly.const(t)
        return t

    def _x_mat(self, a: Root, t):
        pairs = []
        power = self.ring.one()
        for d in self.rep.powers(a):
            pairs.append((power, d))
            power = self.ring.mul(power, t)
        return self.backend.combine(pairs)

    def x(self, root, t) -> GroupElement:
        a = self.root(root)
        t = self._coerce(t)
        return GroupElement(self, self._x_mat(a, t), self._x_mat(a, self.ring.neg(t)))

    def x_one(self, root) -> GroupElement:
        a = self.root(root)
        if a not in self._x_one:
            self._x_one[a] = self.x(a, self.ring.one())
        return self._x_one[a]

    def w(self, root, t=1) -> GroupElement:
        a = self.root(root)
        t = self._coerce(t)
        if not self.ring.is_unit(t):
            raise NonUnitParameter(f"w needs a unit parameter, got {self.ring.format(t)}")
        ti = self.ring.inv(t)
        xa = self.x(a, t)
        return xa * self.x(self.rs.neg(a), self.ring.neg(ti)) * xa

    def h(self, root, t) -> GroupElement:
        a = self.root(root)
        t = self._coerce(t)
        return self.w(a, t) * self.inverse(self.w(a, 1))

    def torus(self, params) -> GroupElement:
        """Product of h_{a_i}(u_i) over the simple roots."""
        g = self.identity()
        for s, u in zip(self.rs.simple_roots, params):
            g = g * self.h(s, u)
        return g

    # arithmetic
    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if g.ctx is not self or h.ctx is not self:
            if g.ctx.dim != h.ctx.dim:
                raise ChevDiophError("dimension mismatch")
        mat = self.backend.mul(g.mat, h.mat)
        inv = None
        if g.inv_mat is not None and h.inv_mat is not None:
            inv = self.backend.mul(h.inv_mat, g.inv_mat)
        return GroupElement(self, mat, inv)

    def inverse(self, g: GroupElement) -> GroupElement:
        if g.inv_mat is None:
            object.__setattr__(g, "inv_mat", self._invert(g))
        return GroupElement(self, g.inv_mat, g.mat)

    def _invert(self, g: GroupElement):
        rep, backend = self.rep, self.backend
        if rep.form is not None:
            # A^T Q A = Q gives A^{-1} = Q^{-1} A^T Q with Q^{-1} = -Q
            q = backend.combine([(self.ring.from_int(-1), rep.form)])
            qp = backend.combine([(self.ring.one(), rep.form)])
            if isinstance(backend, SymbolicBackend):
                at = MatPoly({e: m.T.copy() for e, m in g.mat.terms.items()}, g.mat.variables, g.mat.n)
            else:
                at = g.mat.T.copy()
            return backend.mul(backend.mul(q, at), qp)
        if isinstance(backend, FiniteBackend):
            ident = backend.identity()
            power = g.mat
            prev = ident
            for _ in range(10 ** 6):
                if np.array_equal(power, ident):
                    return prev
                prev = power
                power = backend.mul(power, g.mat)
            raise ChevDiophError("element order too large to invert by powering")
        if isinstance(backend, SymbolicBackend):
            inv = g.mat.nilpotent_inverse()
            if inv is None:
                raise ChevDiophError("symbolic inverse needs a unipotent element")
            return inv
        return _fraction_inverse(g.mat, self.ring)

    def commutator(self, g, h) -> GroupElement:
        return g * h * self.inverse(g) * self.inverse(h)

    def conjugate(self, g, h) -> GroupElement:
        """h g h^{-1}."""
        return h * g * self.inverse(h)

    def power(self, g, k: int) -> GroupElement:
        if k < 0:
            return self.power(self.inverse(g), -k)
        out = self.identity()
        for _ in range(k):
            out = out * g
        return out

    def product(self, items: Iterable[GroupElement]) -> GroupElement:
        out = self.identity()
        for g in items:
            out = out * g
        return out

    # text
    def format_rows(self, g: GroupElement) -> str:
        fmt = self.ring.format
        return "[" + ", ".join("[" + ", ".join(fmt(x) for x in row) + "]" for row in g.rows()) + "]"

    def parse_element(self, text: str, assignment=None) -> GroupElement:
        assignment = assignment or {}
        node = parse_word_text(text, variables=set(assignment), constants=self.ring.constants())
        return self.evaluate(node, assignment)

    def evaluate(self, node, assignment=None) -> GroupElement:
        assignment = assignment or {}
        if isinstance(node, One):
            return self.identity()
        if isinstance(node, Var):
            if node.name not in assignment:
                raise UnknownSymbol(f"unassigned group variable {node.name!r}")
            return assignment[node.name]
        if isinstance(node, Lit):
            root = self.rs.parse_root(node.root)
            t = self.ring.eval_poly(node.param, self.ring.constants())
            return {"x": self.x, "w": self.w, "h": self.h}[node.kind](root, t)
        if isinstance(node, Pow):
            return self.power(self.evaluate(node.base, assignment), node.exp)
        if isinstance(node, Comm):
            return self.commutator(self.evaluate(node.left, assignment),
                                   self.evaluate(node.right, assignment))
        if isinstance(node, Mul):
            return self.product(self.evaluate(f, assignment) for f in node.factors)
        raise TypeError(node)

    # finite-ring helpers
    def unipotent_generators(self) -> list:
        return [self.x_one(a) for a in self.rs.all_roots]

    def bfs_generators(self) -> list:
        gens = list(self.unipotent_generators())
        for s in self.rs.simple_roots:
            for u in self.ring.units():
                if u != self.ring.one():
                    gens.append(self.h(s, u))
        return gens


def _fraction_inverse(mat, ring):
    n = mat.shape[0]
    a = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ChevDiophError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = np.empty((n, n), dtype=object)
    for r in range(n):
        for c in range(n):
            v = a[r][n + c]
            if not ring.is_field:
                if v.denominator != 1:
                    raise ChevDiophError("inverse is not integral")
                v = int(v)
            out[r, c] = v
    return out


_CTX_CACHE: dict = {}


def make_context(system, rep_kind="adjoint", ring="Z") -> GroupContext:
    """Context from names, e.g. ``make_context("C2", "sp", "GF(3)")``."""
    rs = system if isinstance(system, RootSystem) else build_root_system(system)
    ring = make_ring(ring)
    kind = normalize_kind(rep_kind) if isinstance(rep_kind, str) else rep_kind.kind
    key = (str(rs.id), kind, ring.name)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = GroupContext(rs, build_representation(rs, kind), ring)
    return _CTX_CACHE[key]


def element_x(ctx: GroupContext, a, t) -> GroupElement:
    return ctx.x(a, t)


def element_w(ctx: GroupContext, a, t) -> GroupElement:
    return ctx.w(a, t)


def element_h(ctx: GroupContext, a, t) -> GroupElement:
    return ctx.h(a, t)


def multiply(g, h):
    return g.ctx.multiply(g, h)


def inverse(g):
    return g.ctx.inverse(g)


def commutator(g, h):
    return g.ctx.commutator(g, h)


def conjugate(g, h):
    return g.ctx.conjugate(g, h)


# --------------------------------------------------------------------------
# relation checks


@dataclass
class RelationReport:
    context: str
    checks: list = field(default_factory=list)  # (relation, instance, passed)

    def add(self, relation: str, instance: str, passed: bool):
        self.checks.append((relation, instance, bool(passed)))

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c[2]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def counts(self) -> dict:
        out: dict = {}
        for rel, _, passed in self.checks:
            tot, good = out.get(rel, (0, 0))
            out[rel] = (tot + 1, good + int(passed))
        return out


def verify_symbolic(rep: Representation, report: RelationReport | None = None) -> RelationReport:
    """R1 and R2 as identities over Z[t,u]."""
    from .chevalley import derive_commutator_table
    ring = make_ring("ZPoly[t,u]")
    ctx = GroupContext(rep.rs, rep, ring)
    rs = rep.rs
    report = report or RelationReport(ctx.name)
    t, u = Poly.var("t"), Poly.var("u")
    table = derive_commutator_table(rep)
    for a in rs.all_roots:
        report.add("R1", rs.name(a), ctx.x(a, t) * ctx.x(a, u) == ctx.x(a, t + u))
    for a in rs.all_roots:
        xa = ctx.x(a, t)
        for b in rs.all_roots:
            if b == a or b == rs.neg(a):
                continue
            lhs = ctx.commutator(xa, ctx.x(b, u))
            rhs = ctx.identity()
            for i, j, c in table.get(a, b):
                rhs = rhs * ctx.x(rs.combine(i, a, j, b), c * t ** i * u ** j)
            report.add("R2", f"{rs.name(a)},{rs.name(b)}", lhs == rhs)
    return report


def torus_character(rs: RootSystem, params, b: Root, ring: Ring):
    """chi(b) for the torus element prod h_{a_i}(u_i)."""
    val = ring.one()
    for s, u in zip(rs.simple_roots, params):
        val = ring.mul(val, ring.power(u, cartan_pairing(b, s)))
    return val


def verify_relations(ctx: GroupContext, report: RelationReport | None = None) -> RelationReport:
    """R3-R6 and the torus action, exhaustively over the units of a finite ring."""
    if isinstance(ctx.ring, PolynomialRing):
        return verify_symbolic(ctx.rep, report)
    ring, rs = ctx.ring, ctx.rs
    report = report or RelationReport(ctx.name)
    units = ring.units()
    for a in rs.all_roots:
        w1 = ctx.w(a, 1)
        ok = w1 == ctx.x(a, 1) * ctx.x(rs.neg(a), ring.neg(ring.one())) * ctx.x(a, 1)
        for t in units:
            ok = ok and ctx.w(a, t) == ctx.h(a, t) * w1
        ok = ok and ctx.inverse(w1) == ctx.w(a, ring.neg(ring.one()))
        report.add("R3", rs.name(a), ok)
    for a in rs.all_roots:
        wa = ctx.w(a, 1)
        wa_inv = ctx.inverse(wa)
        for b in rs.all_roots:
            wb = reflect(rs, a, b)
            for t in units:
                report.add("R4", f"{rs.name(a)},{rs.name(b)},{ring.format(t)}",
                           wa * ctx.h(b, t) * wa_inv == ctx.h(wb, t))
            signs = set()
            for t in units:
                lhs = wa * ctx.x(b, t) * wa_inv
                if lhs == ctx.x(wb, t):
                    signs.add(1)
                elif lhs == ctx.x(wb, ring.neg(t)):
                    signs.add(-1)
                else:
                    signs.add(None)
            # in characteristic 2 both signs agree, so a single value suffices
            report.add("R5", f"{rs.name(a)},{rs.name(b)}", None not in signs and len(signs) == 1)
    elems = ring.elements()
    for a in rs.all_roots:
        for t in units:
            ha = ctx.h(a, t)
            ha_inv = ctx.inverse(ha)
            for b in rs.all_roots:
                k = cartan_pairing(b, a)
                ok = all(ha * ctx.x(b, u) * ha_inv == ctx.x(b, ring.mul(ring.power(t, k), u))
                         for u in elems)
                report.add("R6", f"{rs.name(a)},{rs.name(b)},{ring.format(t)}", ok)
    for params in itertools.product(units, repeat=rs.rank):
        hc = ctx.torus(params)
        hc_inv = ctx.inverse(hc)
        for b in rs.all_roots:
            chi = torus_character(rs, params, b, ring)
            ok = all(hc * ctx.x(b, u) * hc_inv == ctx.x(b, ring.mul(chi, u)) for u in elems)
            report.add("torus", f"{[ring.format(p) for p in params]},{rs.name(b)}", ok)
    return report


def r5_sign(ctx: GroupContext, a: Root, b: Root) -> int:
    """The sign c(a, b) with w_a x_b(t) w_a^{-1} = x_{w_a(b)}(c t)."""
    wa = ctx.w(a, 1)
    lhs = wa * ctx.x(b, 1) * ctx.inverse(wa)
    wb = reflect(ctx.rs, a, b)
    if lhs == ctx.x(wb, 1):
        return 1
    if lhs == ctx.x(wb, -1):
        return -1
    raise ChevDiophError("R5 sign not found")


# --------------------------------------------------------------------------
# enumeration, centers, centralizers


@dataclass
class GroupTable:
    ctx: GroupContext
    elements: np.ndarray  # (size, dim, dim) uint8/int64 codes, lexicographically sorted
    depth: int
    generators: int

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.size

    @cached_property
    def _index(self) -> dict:
        return {self._row_key(m): i for i, m in enumerate(self.elements)}

    def _row_key(self, m) -> bytes:
        return np.asarray(m, dtype=np.int64).astype(np.uint8 if self.ctx.ring.size <= 256 else np.int64).tobytes()

    def index_of(self, g: GroupElement) -> int | None:
        return self._index.get(self._row_key(g.mat))

    def __contains__(self, g: GroupElement) -> bool:
        return self.index_of(g) is not None

    def element(self, i: int) -> GroupElement:
        return self.ctx.element(self.elements[i].astype(np.int64))

    def __iter__(self):
        for i in range(self.size):
            yield self.element(i)


def _encode_keys(mats: np.ndarray, base: int) -> np.ndarray:
    flat = mats.reshape(len(mats), -1).astype(np.int64)
    keys = np.zeros(len(mats), dtype=np.int64)
    for k in range(flat.shape[1]):
        keys = keys * base + flat[:, k]
    return keys


def enumerate_group(ctx: GroupContext, cap: int = DEFAULT_CAP, generators=None) -> GroupTable:
    """Breadth-first closure of the identity under the BFS generators."""
    if not ctx.ring.is_finite:
        raise CapExceeded(f"{ctx.ring.name} is infinite; the group cannot be enumerated")
    ring = ctx.ring
    gens = generators if generators is not None else ctx.bfs_generators()
    gen_arr = np.stack([g.mat for g in gens]).astype(np.int64)
    n = ctx.dim
    base = ring.size
    small = n * n * np.log2(base) < 62
    store = np.uint8 if base <= 256 else np.int64
    ident = ctx.identity().mat.astype(np.int64)[None]
    frontier = ident
    chunks = [ident.astype(store)]
    total = 1
    depth = 0
    if small:
        seen = np.sort(_encode_keys(ident, base))
    else:
        seen_set = {ident[0].astype(store).tobytes()}
    while len(frontier):
        new_parts = []
        for start in range(0, len(frontier), 20000):
            block = frontier[start:start + 20000]
            prods = ring.vmatmul(block[:, None], gen_arr[None]).reshape(-1, n, n)
            if small:
                keys = _encode_keys(prods, base)
                keys, idx = np.unique(keys, return_index=True)
                fresh = ~np.isin(keys, seen, assume_unique=True)
                cand = prods[idx[fresh]]
                if len(cand):
                    seen = np.union1d(seen, keys[fresh])
                    new_parts.append(cand)
            else:
                keep = []
                for i, m in enumerate(prods.astype(store)):
                    kb = m.tobytes()
                    if kb not in seen_set:
                        seen_set.add(kb)
                        keep.append(i)
                if keep:
                    new_parts.append(prods[keep])
            total = (len(seen) if small else len(seen_set))
            if total > cap:
                raise CapExceeded(f"{ctx.name}: more than {cap} elements")
        if not new_parts:
            break
        frontier = np.concatenate(new_parts)
        chunks.append(frontier.astype(store))
        depth += 1
    elems = np.concatenate(chunks)
    order = np.lexsort(elems.reshape(len(elems), -1).T[::-1])
    return GroupTable(ctx, elems[order], depth, len(gens))


def _commutes_mask(ctx: GroupContext, elems: np.ndarray, s: np.ndarray) -> np.ndarray:
    ring = ctx.ring
    mask = np.ones(len(elems), dtype=bool)
    for start in range(0, len(elems), 50000):
        block = elems[start:start + 50000].astype(np.int64)
        left = ring.vmatmul(block, s[None])
        right = ring.vmatmul(s[None], block)
        mask[start:start + 50000] = np.all((left == right).reshape(len(block), -1), axis=1)
    return mask


def centralizer_mask(table: GroupTable, subset) -> np.ndarray:
    mask = np.ones(table.size, dtype=bool)
    for s in subset:
        idx = np.nonzero(mask)[0]
        sub = _commutes_mask(table.ctx, table.elements[idx], s.mat.astype(np.int64))
        mask[idx[~sub]] = False
    return mask


def centralizer(table: GroupTable, subset) -> list:
    mask = centralizer_mask(table, subset)
    return [table.element(i) for i in np.nonzero(mask)[0]]


def center(table: GroupTable) -> list:
    """Elements commuting with every BFS generator (hence with the whole group)."""
    gens = table.ctx.bfs_generators()
    return centralizer(table, gens)
