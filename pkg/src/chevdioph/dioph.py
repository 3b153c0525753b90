"""Commuting sets, double centralizers, positive-primitive definitions of root
subgroups and the ring operations interpreted inside the group.

Constructions are chosen per root-system type.  Every sign that depends on
the structure-constant convention is read from the derived commutator table
or computed numerically when the construction is built; the enumeration
tests then confirm the defined sets element for element.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .chevalley import derive_commutator_table
from .decomp import read_unipotent
from .errors import CaseUnavailable, ChevDiophError, TargetUnavailable
from .grammar import Comm, Lit, Mul, One, Pow, Var, format_group_expr
from .group import GroupContext, GroupElement, GroupTable, center, centralizer
from .polys import Poly
from .rootsys import Root, RootSystem, reflect, simple_reflection_perms
from .syntax import parse_poly_text
from .words import solve_word_equations

# --------------------------------------------------------------------------
# commuting sets


@dataclass(frozen=True)
class GammaSet:
    alpha: Root
    members: tuple

    def __contains__(self, root) -> bool:
        return root in self.members

    def __len__(self):
        return len(self.members)


@lru_cache(maxsize=None)
def _gamma_cached(ctx: GroupContext, alpha: Root) -> GammaSet:
    xa = ctx.x_one(alpha)
    members = tuple(b for b in ctx.rs.all_roots if ctx.x_one(b) * xa == xa * ctx.x_one(b))
    return GammaSet(alpha, members)


def gamma_set(ctx: GroupContext, alpha) -> GammaSet:
    """Roots b with x_b(1) commuting with x_alpha(1), decided by matrix equality."""
    return _gamma_cached(ctx, ctx.root(alpha))


# --------------------------------------------------------------------------
# root-system helpers


def _c_type(rs: RootSystem) -> bool:
    """Systems where short-root centralizers pick up two long-root factors."""
    return rs.id.family == "C" or (rs.id.family == "B" and rs.rank == 2)


def _rank_two_c(rs: RootSystem) -> bool:
    return rs.rank == 2 and rs.id.family in "BC"


def is_c_short(rs: RootSystem, a: Root) -> bool:
    return _c_type(rs) and not rs.is_long(a)


def long_partners(rs: RootSystem, a: Root) -> tuple:
    """Long roots (l, m), in root order, with l + m = 2a."""
    for lam in rs.all_roots:
        if not rs.is_long(lam):
            continue
        mu = rs.combine(2, a, -1, lam)
        if mu is not None and rs.is_long(mu) and rs.index(lam) < rs.index(mu):
            return lam, mu
    raise ChevDiophError(f"no long partners for {rs.name(a)}")


def predicted_roots(rs: RootSystem, a: Root) -> tuple:
    return (a,) + long_partners(rs, a) if is_c_short(rs, a) else (a,)


def _comm_terms(ctx: GroupContext, a: Root, b: Root) -> tuple:
    """((i, j, c, root), ...) with [x_a(t), x_b(u)] = prod x_root(c t^i u^j)."""
    table = derive_commutator_table(ctx.rep)
    rs = ctx.rs
    return tuple((i, j, c, rs.combine(i, a, j, b)) for i, j, c in table.get(a, b))


def _a2_pairs(ctx: GroupContext, g: Root) -> list:
    """(a, b, N) with a + b = g, all three of one length, [x_a(t), x_b(u)] = x_g(N t u)."""
    rs = ctx.rs
    out = []
    for a in rs.all_roots:
        b = rs.combine(1, g, -1, a)
        if b is None or rs.length_sq(a) != rs.length_sq(g) or rs.length_sq(b) != rs.length_sq(g):
            continue
        terms = _comm_terms(ctx, a, b)
        if len(terms) == 1 and terms[0][:2] == (1, 1) and abs(terms[0][2]) == 1:
            out.append((a, b, terms[0][2]))
    return out


def _b2_triples(rs: RootSystem, g: Root) -> list:
    """For short g: (a long, b short) with a + b = g and a + 2b a long root."""
    out = []
    for b in rs.all_roots:
        if rs.is_long(b):
            continue
        a = rs.combine(1, g, -1, b)
        if a is not None and rs.is_long(a) and rs.combine(1, a, 2, b) is not None:
            out.append((a, b))
    return out


def _b2_from_long(rs: RootSystem, g: Root) -> list:
    """For long g: short b with g + b short and g + 2b long."""
    out = []
    for b in rs.all_roots:
        if rs.is_long(b):
            continue
        s = rs.add(g, b)
        if s is not None and not rs.is_long(s) and rs.combine(1, g, 2, b) is not None:
            out.append(b)
    return out


def _reflector(rs: RootSystem, src: Root, dst: Root) -> Root:
    for r in rs.all_roots:
        if reflect(rs, r, src) == dst:
            return r
    raise ChevDiophError(f"no reflection takes {rs.name(src)} to {rs.name(dst)}")


def _e(rs: RootSystem, *terms) -> Root:
    vec = [0] * rs.dim
    for coef, k in terms:
        vec[k] += 2 * coef
    root = rs.get(vec)
    if root is None:
        raise ChevDiophError("template root missing")
    return root


def _c_chain_roots(rs: RootSystem, g: Root) -> tuple:
    """(a, b, c) with [[C(Gamma_a), x_b(1)], x_c(1)] = X_g in C_l, l >= 3.

    The template (e1-e2, e2-e3, e1+e2) for e1-e3 is moved to g along the
    Weyl orbit.
    """
    template = (_e(rs, (1, 0), (-1, 2)), _e(rs, (1, 0), (-1, 1)),
                _e(rs, (1, 1), (-1, 2)), _e(rs, (1, 0), (1, 1)))
    start = tuple(rs.index(r) for r in template)
    perms = simple_reflection_perms(rs)
    seen = {start}
    queue = deque([start])
    target = rs.index(g)
    while queue:
        cur = queue.popleft()
        if cur[0] == target:
            return tuple(rs.all_roots[k] for k in cur[1:])
        for p in perms:
            nxt = tuple(p[k] for k in cur)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    raise ChevDiophError(f"{rs.name(g)} is not in the Weyl orbit of e1-e3")


def _half(ctx: GroupContext):
    ring = ctx.ring
    two = ring.from_int(2)
    if not ring.is_unit(two):
        return None
    return ring.inv(two)


def _is_adjoint(ctx: GroupContext) -> bool:
    return ctx.rep.kind == "adjoint"


# --------------------------------------------------------------------------
# double centralizers


@dataclass
class CentralizerReport:
    alpha: Root
    gamma: GammaSet
    computed: list
    predicted: list
    form: tuple  # roots of the predicted normal form, times the center
    center_size: int
    missing: list = field(default_factory=list)  # predicted, not computed
    extra: list = field(default_factory=list)  # computed, not predicted

    @property
    def equal(self) -> bool:
        return not self.missing and not self.extra

    @property
    def verdict(self) -> str:
        return "equal" if self.equal else "unequal"

    @property
    def contained(self) -> bool:
        """computed is a subset of predicted (the inclusion the normal form asserts)."""
        return not self.extra


def predicted_centralizer(ctx: GroupContext, alpha: Root, center_elems) -> list:
    roots = predicted_roots(ctx.rs, alpha)
    elems = {}
    for params in itertools.product(ctx.ring.elements(), repeat=len(roots)):
        u = ctx.product(ctx.x(r, t) for r, t in zip(roots, params))
        for c in center_elems:
            g = c * u
            elems.setdefault(g.key, g)
    return list(elems.values())


def double_centralizer_report(table: GroupTable, alpha) -> CentralizerReport:
    ctx = table.ctx
    alpha = ctx.root(alpha)
    gam = gamma_set(ctx, alpha)
    computed = centralizer(table, [ctx.x_one(b) for b in gam.members])
    zee = center(table)
    predicted = predicted_centralizer(ctx, alpha, zee)
    ck = {g.key: g for g in computed}
    pk = {g.key: g for g in predicted}
    report = CentralizerReport(alpha, gam, computed, predicted, predicted_roots(ctx.rs, alpha), len(zee))
    report.missing = [g for k, g in pk.items() if k not in ck]
    report.extra = [g for k, g in ck.items() if k not in pk]
    return report


# --------------------------------------------------------------------------
# carriers: subgroups parametrized by the ring


@dataclass(frozen=True)
class Carrier:
    """psi(t) = prod x_{roots[i]}(signs[i] t)."""

    name: str
    roots: tuple
    signs: tuple

    def psi(self, ctx: GroupContext, t) -> GroupElement:
        ring = ctx.ring
        return ctx.product(ctx.x(r, t if s == 1 else ring.neg(t)) for r, s in zip(self.roots, self.signs))

    def read(self, ctx: GroupContext, g: GroupElement):
        """t with psi(t) = g, or None when g is outside the carrier."""
        params = read_unipotent(ctx, g, self.roots)
        if params is None:
            return None
        ring = ctx.ring
        t = params[0] if self.signs[0] == 1 else ring.neg(params[0])
        for p, s in zip(params[1:], self.signs[1:]):
            if p != (t if s == 1 else ring.neg(t)):
                return None
        return t

    def elements(self, ctx: GroupContext) -> list:
        return [self.psi(ctx, t) for t in ctx.ring.elements()]


def root_carrier(ctx: GroupContext, g: Root) -> Carrier:
    return Carrier("X" + ctx.rs.name(g), (g,), (1,))


def y_roots(ctx: GroupContext) -> tuple:
    """(lam, b, c1, c2): lam highest, b short, [x_lam(t), x_b(1)] = x_{lam+b}(c1 t) x_{lam+2b}(c2 t)."""
    rs = ctx.rs
    if not _rank_two_c(rs):
        raise TargetUnavailable("the set Y exists only in rank-two C/B systems")
    lam = rs.highest_root
    for b in rs.all_roots:
        if rs.is_long(b):
            continue
        s1, s2 = rs.add(lam, b), rs.combine(1, lam, 2, b)
        if s1 is not None and s2 is not None:
            terms = {r: c for _, _, c, r in _comm_terms(ctx, lam, b)}
            return lam, b, terms[s1], terms[s2]
    raise ChevDiophError("no Y configuration")


def y_carrier(ctx: GroupContext) -> Carrier:
    lam, b, c1, c2 = y_roots(ctx)
    rs = ctx.rs
    order = [r for _, _, _, r in _comm_terms(ctx, lam, b)]
    s1, s2 = rs.add(lam, b), rs.combine(1, lam, 2, b)
    signs = {s1: 1, s2: c1 * c2}
    return Carrier("Y", tuple(order), tuple(signs[r] for r in order))


def parse_carrier(ctx: GroupContext, text) -> Carrier:
    if isinstance(text, Carrier):
        return text
    if isinstance(text, Root):
        return root_carrier(ctx, text)
    s = str(text).strip()
    if s == "Y":
        return y_carrier(ctx)
    if s.startswith("X"):
        s = s[1:]
    return root_carrier(ctx, ctx.root(s))


def default_carrier(ctx: GroupContext) -> Carrier:
    rs = ctx.rs
    if rs.rank < 2:
        raise CaseUnavailable("rank-one systems admit no interpretation")
    if _rank_two_c(rs) and not _is_adjoint(ctx) and _half(ctx) is None:
        return y_carrier(ctx)
    return root_carrier(ctx, rs.add(rs.simple_roots[0], rs.simple_roots[1]))


# --------------------------------------------------------------------------
# positive-primitive formulas


@dataclass
class PPFormula:
    """Exists exist_vars: conjunction of lhs = rhs, with free variables free_vars."""

    context: str
    target: str
    free_vars: tuple
    exist_vars: tuple
    equations: list

    @property
    def variables(self) -> tuple:
        return self.free_vars + self.exist_vars

    @property
    def constants(self) -> list:
        out: list = []

        def walk(n):
            if isinstance(n, Lit):
                if n not in out:
                    out.append(n)
            elif isinstance(n, Pow):
                walk(n.base)
            elif isinstance(n, Comm):
                walk(n.left)
                walk(n.right)
            elif isinstance(n, Mul):
                for f in n.factors:
                    walk(f)

        for lhs, rhs in self.equations:
            walk(lhs)
            walk(rhs)
        return out

    def to_text(self) -> str:
        lines = [f"# target {self.target}",
                 f"# free {', '.join(self.free_vars)}"]
        if self.exist_vars:
            lines.append(f"# exists {', '.join(self.exist_vars)}")
        lines.append(f"group {self.context};")
        lines.append(f"var {', '.join(self.variables)};")
        for lhs, rhs in self.equations:
            lines.append(f"eq {format_group_expr(lhs)} = {format_group_expr(rhs)};")
        return "\n".join(lines) + "\n"

    def solution_set(self, table: GroupTable, budget=None) -> set:
        """Keys of the free-variable values for which the formula holds."""
        res = solve_word_equations(table, self.variables, self.equations,
                                   project=list(self.free_vars), budget=budget)
        if len(self.free_vars) == 1:
            return {k[0] for k in res.projected}
        return set(res.projected)

    def holds(self, ctx: GroupContext, free_values: dict, witnesses: dict) -> bool:
        env = dict(free_values)
        env.update(witnesses)
        return all(ctx.evaluate(l, env) == ctx.evaluate(r, env) for l, r in self.equations)


def context_header(ctx: GroupContext) -> str:
    return f"{ctx.rs.id} {ctx.rep.label} {ctx.ring.name}"


def ring_value_poly(ctx: GroupContext, value) -> Poly:
    return parse_poly_text(ctx.ring.format(value), set(ctx.ring.constants()))


class PPBuilder:
    """Accumulates equations and fresh existential variables."""

    def __init__(self, ctx: GroupContext, prefix: str = "y", taken=()):
        self.ctx = ctx
        self.rs = ctx.rs
        self.prefix = prefix
        self.equations: list = []
        self.exists: list = []
        self._taken = set(taken)
        self._k = 0

    # nodes
    def fresh(self) -> str:
        while True:
            self._k += 1
            name = f"{self.prefix}{self._k}"
            if name not in self._taken:
                self._taken.add(name)
                self.exists.append(name)
                return name

    def lit(self, root: Root, t=None) -> Lit:
        param = Poly.const(1) if t is None else ring_value_poly(self.ctx, t)
        return Lit("x", self.rs.name(root), param)

    def weyl(self, root: Root):
        """Word for w_root(1) = x_root(1) x_{-root}(1)^-1 x_root(1)."""
        a = self.lit(root)
        return Mul((a, Pow(self.lit(self.rs.neg(root)), -1), a))

    def conj(self, word, node):
        return Mul((word, node, Pow(word, -1)))

    def psi(self, carrier: Carrier, t):
        ring = self.ctx.ring
        lits = [self.lit(r, t if s == 1 else ring.neg(t)) for r, s in zip(carrier.roots, carrier.signs)]
        return lits[0] if len(lits) == 1 else Mul(tuple(lits))

    def eq(self, lhs, rhs):
        self.equations.append((lhs, rhs))

    @staticmethod
    def prod(factors):
        factors = list(factors)
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    # membership
    def centralizer(self, v: str, a: Root):
        for b in gamma_set(self.ctx, a).members:
            self.eq(Comm(Var(v), self.lit(b)), One())

    def mod_center(self, v: str, a: Root):
        """v in X_a Z(G) (or a subset of it containing X_a when a is C-short)."""
        if is_c_short(self.rs, a):
            self.exact(v, a)
        else:
            self.centralizer(v, a)

    def exact(self, v: str, g: Root):
        ctx, rs = self.ctx, self.rs
        if rs.rank < 2:
            raise TargetUnavailable("rank-one systems are not covered")
        if rs.id.family == "G":
            self.centralizer(v, g)  # adjoint G2: the center is trivial
            return
        if _rank_two_c(rs):
            self._rank_two(v, g)
            return
        if not is_c_short(rs, g) and not (_c_type(rs) and rs.is_long(g)):
            pairs = [p for p in _a2_pairs(ctx, g) if not is_c_short(rs, p[0])]
            if pairs:
                a, b, _ = pairs[0]
                y = self.fresh()
                self.centralizer(y, a)
                self.eq(Var(v), Comm(Var(y), self.lit(b)))
                return
        if is_c_short(rs, g):
            a, b, c = _c_chain_roots(rs, g)
            y = self.fresh()
            self.centralizer(y, a)
            self.eq(Var(v), Comm(Comm(Var(y), self.lit(b)), self.lit(c)))
            return
        if not rs.is_long(g):
            # B_l short: X_g Z  meets  [X_a, x_b(1)] X_{a+2b}
            a, b = _b2_triples(rs, g)[0]
            d = rs.combine(1, a, 2, b)
            y1, y2 = self.fresh(), self.fresh()
            self.exact(y1, a)
            self.exact(y2, d)
            self.centralizer(v, g)
            self.eq(Comm(Var(y1), self.lit(b)), self._ordered(a, b, {g: Var(v), d: Var(y2)}))
            return
        # C_l long: X_g Z  meets  [X_a Z, x_b(1)] X_{a+b}
        b = _b2_from_long(rs, g)[0]
        b = rs.neg(b)
        a = rs.combine(1, g, 2, b)
        s = rs.add(a, b)
        y1, y2 = self.fresh(), self.fresh()
        self.centralizer(y1, a)
        self.exact(y2, s)
        self.centralizer(v, g)
        self.eq(Comm(Var(y1), self.lit(b)), self._ordered(a, b, {s: Var(y2), g: Var(v)}))

    def _ordered(self, a: Root, b: Root, nodes: dict):
        """Factors of [x_a(t), x_b(1)] in product order, each replaced by nodes[root]."""
        return self.prod(nodes[r] for _, _, _, r in _comm_terms(self.ctx, a, b))

    def _shift(self, v: str, g: Root, y_member):
        """v = [y, x_b(1)] (w y w^-1)^k, y ranging over a long root subgroup."""
        ctx, rs = self.ctx, self.rs
        lam, b = _b2_triples(rs, g)[0]
        d = rs.combine(1, lam, 2, b)
        rho = _reflector(rs, lam, d)
        c2 = {r: c for _, _, c, r in _comm_terms(ctx, lam, b)}[d]
        eta = _conj_sign(ctx, rho, lam, d)
        k = -c2 * eta
        y = self.fresh()
        y_member(y, lam)
        moved = self.conj(self.weyl(rho), Var(y))
        self.eq(Var(v), Mul((Comm(Var(y), self.lit(b)), moved if k == 1 else Pow(moved, -1))))

    def _rank_two(self, v: str, g: Root):
        ctx, rs = self.ctx, self.rs
        if _is_adjoint(ctx):
            if rs.is_long(g):
                self.centralizer(v, g)
            else:
                self._shift(v, g, self.centralizer)
            return
        half = _half(ctx)
        if half is None:
            raise TargetUnavailable(
                f"X{rs.name(g)} needs 1/2 in {ctx.ring.name} for the simply connected rank-two C group")
        if not rs.is_long(g):
            self._shift(v, g, self.exact)
            return
        for d in rs.all_roots:
            e = rs.combine(1, g, -1, d)
            if rs.is_long(d) or e is None or rs.is_long(e):
                continue
            terms = _comm_terms(ctx, d, e)
            if len(terms) == 1 and terms[0][3] == g:
                u = self.fresh()
                self._shift(u, d, self.centralizer)
                self.eq(Var(v), Comm(Var(u), self.lit(e, half)))
                return
        raise ChevDiophError(f"no short pair for {rs.name(g)}")


def _conj_sign(ctx: GroupContext, rho: Root, src: Root, dst: Root) -> int:
    """eta with w_rho(1) x_src(1) w_rho(1)^-1 = x_dst(eta)."""
    w = ctx.w(rho, 1)
    g = ctx.conjugate(ctx.x_one(src), w)
    if g == ctx.x_one(dst):
        return 1
    if g == ctx.x(dst, ctx.ring.neg(ctx.ring.one())):
        return -1
    raise ChevDiophError("Weyl conjugate is not a root element")


def e_define_subgroup(ctx: GroupContext, target) -> PPFormula:
    """A pp-formula in one free variable ``v`` defining the target subgroup."""
    carrier = parse_carrier(ctx, target)
    b = PPBuilder(ctx, taken={"v"})
    if carrier.name == "Y":
        lam, beta, _, _ = y_roots(ctx)
        y = b.fresh()
        b.centralizer(y, lam)
        b.eq(Var("v"), Comm(Var(y), b.lit(beta)))
    else:
        b.exact("v", carrier.roots[0])
    return PPFormula(context_header(ctx), carrier.name, ("v",), tuple(b.exists), b.equations)


def carrier_membership(b: PPBuilder, v: str, carrier: Carrier):
    if carrier.name == "Y":
        lam, beta, _, _ = y_roots(b.ctx)
        y = b.fresh()
        b.centralizer(y, lam)
        b.eq(Var(v), Comm(Var(y), b.lit(beta)))
    else:
        b.exact(v, carrier.roots[0])


# --------------------------------------------------------------------------
# interpreted ring operations


class Interpretation:
    """The ring on a carrier: phi(a) = psi(eps a), x (+) y = x y, x (*) y per case."""

    case: int
    carrier: Carrier
    eps: int

    def __init__(self, ctx: GroupContext):
        self.ctx = ctx

    def phi(self, a) -> GroupElement:
        ring = self.ctx.ring
        return self.carrier.psi(self.ctx, a if self.eps == 1 else ring.neg(a))

    def phi_inv(self, g: GroupElement):
        t = self.carrier.read(self.ctx, g)
        if t is None:
            return None
        return t if self.eps == 1 else self.ctx.ring.neg(t)

    def phi_node(self, b: PPBuilder, a):
        ring = self.ctx.ring
        return b.psi(self.carrier, a if self.eps == 1 else ring.neg(a))

    def oplus(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return x * y

    def otimes(self, x: GroupElement, y: GroupElement) -> GroupElement:
        raise NotImplementedError

    def encode_otimes(self, b: PPBuilder, x: str, y: str, z: str):
        """Equations forcing z = x (*) y, given x, y, z already in the carrier."""
        raise NotImplementedError

    def _param(self, g: GroupElement):
        t = self.carrier.read(self.ctx, g)
        if t is None:
            raise ChevDiophError("element is outside the carrier")
        return t

    def describe(self) -> str:
        return f"case {self.case} on {self.carrier.name}"


class ProductCase(Interpretation):
    """Carrier X_g with g = a + b inside a same-length A2: x (*) y = [x_1, y_1]."""

    case = 1

    def __init__(self, ctx, g: Root, a: Root, b: Root, n: int):
        super().__init__(ctx)
        self.g, self.a, self.b, self.n = g, a, b, n
        self.carrier = root_carrier(ctx, g)
        self.eps = n

    def otimes(self, x, y):
        ctx, ring = self.ctx, self.ctx.ring
        sign = (lambda t: t) if self.n == 1 else ring.neg
        x1 = ctx.x(self.a, sign(self._param(x)))
        y1 = ctx.x(self.b, sign(self._param(y)))
        return ctx.commutator(x1, y1)

    def encode_otimes(self, b, x, y, z):
        x1, y1 = b.fresh(), b.fresh()
        b.mod_center(x1, self.a)
        b.eq(Comm(Var(x1), b.lit(self.b)), Var(x))
        b.mod_center(y1, self.b)
        b.eq(Comm(b.lit(self.a), Var(y1)), Var(y))
        b.eq(Var(z), Comm(Var(x1), Var(y1)))


class _Transfer:
    """mu: X_a -> X_g, x_a(t) -> the X_g factor of [x_a(t), x_b(1)] = x_g(c t) * rest."""

    def __init__(self, ctx: GroupContext, a: Root, b: Root, g: Root):
        self.ctx, self.a, self.b, self.g = ctx, a, b, g
        self.terms = _comm_terms(ctx, a, b)
        self.c = {r: c for i, j, c, r in self.terms}[g]
        self.order = [r for _, _, _, r in self.terms]

    def forward(self, x: GroupElement) -> GroupElement:
        ctx = self.ctx
        params = read_unipotent(ctx, ctx.commutator(x, ctx.x_one(self.b)), self.order)
        if params is None:
            raise ChevDiophError("commutator does not peel")
        return ctx.x(self.g, params[self.order.index(self.g)])

    def backward(self, y: GroupElement) -> GroupElement:
        ctx, ring = self.ctx, self.ctx.ring
        p = read_unipotent(ctx, y, [self.g])
        if p is None:
            raise ChevDiophError("element is outside the image carrier")
        return ctx.x(self.a, p[0] if self.c == 1 else ring.neg(p[0]))

    def encode(self, b: PPBuilder, src: str, dst: str, member):
        """[src, x_b(1)] = product with dst at g and fresh witnesses elsewhere."""
        nodes = {}
        for r in self.order:
            if r == self.g:
                nodes[r] = Var(dst)
            else:
                w = b.fresh()
                member(w, r)
                nodes[r] = Var(w)
        b.eq(Comm(Var(src), b.lit(self.b)), b.prod(nodes[r] for r in self.order))


class G2ShortCase(Interpretation):
    """Short carrier in G2, transported from a long A2 carrier by mu."""

    case = 2

    def __init__(self, ctx, g: Root, a: Root, b: Root, inner: ProductCase):
        super().__init__(ctx)
        self.g, self.inner = g, inner
        self.mu = _Transfer(ctx, a, b, g)
        self.carrier = root_carrier(ctx, g)
        self.eps = self.mu.c * inner.eps

    def otimes(self, x, y):
        mu = self.mu
        return mu.forward(self.inner.otimes(mu.backward(x), mu.backward(y)))

    def encode_otimes(self, b, x, y, z):
        xs, ys, zs = b.fresh(), b.fresh(), b.fresh()
        for s, t in ((xs, x), (ys, y), (zs, z)):
            b.centralizer(s, self.mu.a)
            self.mu.encode(b, s, t, b.centralizer)
        self.inner.encode_otimes(b, xs, ys, zs)


class ShortLongCase(Interpretation):
    """Short carrier X_{a+b} in a B2 configuration: x (*) y uses w y w^-1 in X_b."""

    case = 3

    def __init__(self, ctx, g: Root, a: Root, b: Root):
        super().__init__(ctx)
        rs = ctx.rs
        self.g, self.a, self.b = g, a, b
        self.d = rs.combine(1, a, 2, b)
        self.rho = _reflector(rs, g, b)
        self.mu = _Transfer(ctx, a, b, g)
        self.carrier = root_carrier(ctx, g)
        self.eps = _conj_sign(ctx, self.rho, g, b)

    def otimes(self, x, y):
        ctx = self.ctx
        x1 = self.mu.backward(x)
        y2 = ctx.conjugate(y, ctx.w(self.rho, 1))
        order = self.mu.order
        params = read_unipotent(ctx, ctx.commutator(x1, y2), order)
        return ctx.x(self.g, params[order.index(self.g)])

    def encode_otimes(self, b, x, y, z):
        x1 = b.fresh()
        b.mod_center(x1, self.a)
        self.mu.encode(b, x1, x, b.centralizer)
        moved = b.conj(b.weyl(self.rho), Var(y))
        nodes = {}
        for r in self.mu.order:
            if r == self.g:
                nodes[r] = Var(z)
            else:
                w = b.fresh()
                b.centralizer(w, r)
                nodes[r] = Var(w)
        b.eq(Comm(Var(x1), moved), b.prod(nodes[r] for r in self.mu.order))


class YCase(Interpretation):
    """The carrier Y in the simply connected rank-two C group without 1/2."""

    case = 4

    def __init__(self, ctx):
        super().__init__(ctx)
        rs = ctx.rs
        self.lam, self.b, self.c1, self.c2 = y_roots(ctx)
        self.s1 = rs.add(self.lam, self.b)
        self.s2 = rs.combine(1, self.lam, 2, self.b)
        self.carrier = y_carrier(ctx)
        self.order = list(self.carrier.roots)
        w = ctx.w(self.lam, 1)
        moved = ctx.conjugate(ctx.x_one(self.s1), w)
        p = read_unipotent(ctx, moved, [self.b])
        if p is None:
            raise ChevDiophError("Weyl conjugate is not a root element")
        self.eps = 1 if p[0] == ctx.ring.one() else -1

    def otimes(self, x, y):
        ctx, ring = self.ctx, self.ctx.ring
        t = self._param(x)
        x1 = ctx.x(self.lam, t if self.c1 == 1 else ring.neg(t))
        y2 = ctx.conjugate(y, ctx.w(self.lam, 1))
        params = read_unipotent(ctx, ctx.commutator(x1, y2), self.order)
        p = params[self.order.index(self.s1)]
        return self.carrier.psi(ctx, p)

    def encode_otimes(self, b, x, y, z):
        x1, r = b.fresh(), b.fresh()
        b.centralizer(x1, self.lam)
        b.eq(Comm(Var(x1), b.lit(self.b)), Var(x))
        b.centralizer(r, self.s2)
        moved = b.conj(b.weyl(self.lam), Var(y))
        b.eq(Comm(Var(x1), moved), Mul((Var(z), Var(r))))


class TransportCase(Interpretation):
    """Long carrier X_g moved to a short carrier X_{g+b} by mu."""

    def __init__(self, ctx, g: Root, b: Root, base: Interpretation):
        super().__init__(ctx)
        self.g, self.base = g, base
        self.case = base.case
        self.mu = _Transfer(ctx, g, b, ctx.rs.add(g, b))
        self.carrier = root_carrier(ctx, g)
        self.eps = self.mu.c * base.eps

    def otimes(self, x, y):
        mu = self.mu
        return mu.backward(self.base.otimes(mu.forward(x), mu.forward(y)))

    def encode_otimes(self, b, x, y, z):
        xs, ys, zs = b.fresh(), b.fresh(), b.fresh()
        for s, t in ((xs, x), (ys, y), (zs, z)):
            carrier_membership(b, s, self.base.carrier)
            self.mu.encode(b, t, s, b.centralizer)
        self.base.encode_otimes(b, xs, ys, zs)

    def describe(self) -> str:
        return f"case {self.case} on {self.carrier.name} via {self.base.carrier.name}"


def _root_interpretation(ctx: GroupContext, g: Root) -> Interpretation:
    rs = ctx.rs
    if rs.id.family == "G":
        if rs.is_long(g):
            a, b, n = _a2_pairs(ctx, g)[0]
            return ProductCase(ctx, g, a, b, n)
        for a, b in _b2_like_g2(ctx, g):
            inner_pairs = _a2_pairs(ctx, a)
            if inner_pairs:
                ia, ib, n = inner_pairs[0]
                return G2ShortCase(ctx, g, a, b, ProductCase(ctx, a, ia, ib, n))
        raise CaseUnavailable(f"no transfer for {rs.name(g)}")
    if _rank_two_c(rs) and not _is_adjoint(ctx) and _half(ctx) is None:
        raise CaseUnavailable("use the carrier Y: 1/2 is not in the ring")
    pairs = _a2_pairs(ctx, g)
    if pairs and not _rank_two_c(rs):
        a, b, n = pairs[0]
        return ProductCase(ctx, g, a, b, n)
    if not rs.is_long(g):
        triples = _b2_triples(rs, g)
        if triples:
            a, b = triples[0]
            return ShortLongCase(ctx, g, a, b)
    else:
        partners = _b2_from_long(rs, g)
        if partners:
            b = partners[0]
            return TransportCase(ctx, g, b, _root_interpretation(ctx, rs.add(g, b)))
    raise CaseUnavailable(f"no interpretation on X{rs.name(g)}")


def _b2_like_g2(ctx: GroupContext, g: Root):
    """(a long, b short) with a + b = g and [x_a(t), x_b(1)] carrying x_g(+-t)."""
    rs = ctx.rs
    for b in rs.all_roots:
        if rs.is_long(b):
            continue
        a = rs.combine(1, g, -1, b)
        if a is None or not rs.is_long(a):
            continue
        terms = {r: (i, j, c) for i, j, c, r in _comm_terms(ctx, a, b)}
        if g in terms and terms[g][:2] == (1, 1) and abs(terms[g][2]) == 1:
            yield a, b


def interpreted_ring_ops(ctx: GroupContext, carrier=None) -> Interpretation:
    if ctx.rs.rank < 2:
        raise CaseUnavailable("rank-one systems admit no interpretation")
    carrier = default_carrier(ctx) if carrier is None else parse_carrier(ctx, carrier)
    if carrier.name == "Y":
        return YCase(ctx)
    return _root_interpretation(ctx, carrier.roots[0])


@dataclass
class IsomorphismReport:
    interpretation: str
    pairs: int
    failures: list  # (operation, a, b, expected, got)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_ring_isomorphism(ctx: GroupContext, carrier=None) -> IsomorphismReport:
    interp = interpreted_ring_ops(ctx, carrier)
    ring = ctx.ring
    elems = ring.elements()
    image = {a: interp.phi(a) for a in elems}
    failures = []
    if len({g.key for g in image.values()}) != len(elems):
        failures.append(("injective", None, None, len(elems), len({g.key for g in image.values()})))
    for a in elems:
        for b in elems:
            s = interp.oplus(image[a], image[b])
            if s != image[ring.add(a, b)]:
                failures.append(("oplus", ring.format(a), ring.format(b), ring.format(ring.add(a, b)),
                                 interp.phi_inv(s)))
            p = interp.otimes(image[a], image[b])
            if p != image[ring.mul(a, b)]:
                failures.append(("otimes", ring.format(a), ring.format(b), ring.format(ring.mul(a, b)),
                                 interp.phi_inv(p)))
    return IsomorphismReport(interp.describe(), len(elems) ** 2, failures)
