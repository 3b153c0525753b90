"""Bruhat and Gauss (UTV) normal forms, opposite-root shifts and CRT splits.

Every representation basis is ordered so that positive root elements are
strictly upper triangular, the torus is diagonal and negative root elements
are strictly lower triangular.  Normal forms are therefore read off matrices
by triangular elimination, and every produced form is checked by
recomposition before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, ChevDiophError, NonUnitDenominator, RewriteDivergence
from .grammar import parse_word_text
from .group import GroupContext, GroupElement, make_context
from .rings import IntegersModN, crt_split
from .rootsys import Root, WeylElement, generate_weyl


# --------------------------------------------------------------------------
# reading parameters from matrices


def _unit_entry(ctx: GroupContext, a: Root):
    """Position (r, c) of an entry of pi(e_a) that is +-1."""
    e = ctx.rep.e(a)
    for r, c in np.argwhere(np.abs(e) == 1):
        return int(r), int(c), int(e[r, c])
    raise ChevDiophError(f"no unit entry for root {ctx.rs.name(a)}")


def read_unipotent(ctx: GroupContext, g: GroupElement, roots) -> list | None:
    """Parameters p with g = prod x_{roots[i]}(p_i), or None if no such product.

    The factor of smallest absolute height is peeled first, from whichever
    end of the product it sits on.
    """
    roots = list(roots)
    if not roots:
        return [] if g == ctx.identity() else None
    ring = ctx.ring
    from_left = abs(roots[0].height) <= abs(roots[-1].height)
    order = range(len(roots)) if from_left else range(len(roots) - 1, -1, -1)
    params = [None] * len(roots)
    rest = g
    for k in order:
        a = roots[k]
        r, c, sign = _unit_entry(ctx, a)
        val = rest.rows()[r][c]
        val = val if sign == 1 else ring.neg(val)
        params[k] = val
        step = ctx.x(a, ring.neg(val))
        rest = step * rest if from_left else rest * step
    if rest != ctx.identity():
        return None
    return params


@lru_cache(maxsize=None)
def _torus_lookup(ctx: GroupContext) -> dict:
    table = {}
    for params in itertools.product(ctx.ring.units(), repeat=ctx.rs.rank):
        table.setdefault(ctx.torus(params).key, params)
    return table


def read_torus(ctx: GroupContext, g: GroupElement):
    """Simple-root parameters (u_1..u_l) with g = prod h_{a_i}(u_i), or None."""
    if ctx.ring.is_finite:
        return _torus_lookup(ctx).get(g.key)
    if ctx.rep.kind in ("naturalSL", "naturalSp"):
        ring = ctx.ring
        rows = g.rows()
        params, acc = [], ring.one()
        for i in range(ctx.rs.rank):
            d = rows[i][i]
            if not ring.is_unit(d):
                return None
            acc = ring.mul(acc, d)
            params.append(acc)
        return tuple(params) if ctx.torus(params) == g else None
    raise ChevDiophError("torus parameters can only be read for finite rings or natural representations")


def _is_upper(ctx: GroupContext, g: GroupElement) -> bool:
    zero = ctx.ring.zero()
    rows = g.rows()
    return all(rows[r][c] == zero for r in range(ctx.dim) for c in range(r))


def _diagonal_part(ctx: GroupContext, g: GroupElement) -> GroupElement:
    rows = g.rows()
    zero = ctx.ring.zero()
    return ctx.from_rows([[rows[r][c] if r == c else zero for c in range(ctx.dim)] for r in range(ctx.dim)])


# --------------------------------------------------------------------------
# Bruhat decomposition


@dataclass(frozen=True)
class BruhatForm:
    t: tuple  # parameters of h_{a_i} over the simple roots
    a_params: tuple  # (root, value) over the positive roots in height order
    w: WeylElement
    b_params: tuple  # (root, value); zero wherever w(root) is positive

    def key(self):
        return (self.t, tuple(v for _, v in self.a_params), self.w.reduced_word,
                tuple(v for _, v in self.b_params))


def weyl_lift(ctx: GroupContext, w: WeylElement) -> GroupElement:
    """The fixed lift: product of w_{a_i}(1) along the stored reduced word."""
    return ctx.product(ctx.w(ctx.rs.simple_roots[i], 1) for i in w.reduced_word)


def inversion_set(ctx: GroupContext, w: WeylElement) -> list:
    """Positive roots (height order) sent to negative roots by w."""
    return [a for a in ctx.rs.positive_roots if not w.apply(ctx.rs, a).is_positive]


def recompose_bruhat(ctx: GroupContext, form: BruhatForm) -> GroupElement:
    g = ctx.torus(form.t)
    for a, v in form.a_params:
        g = g * ctx.x(a, v)
    g = g * weyl_lift(ctx, form.w)
    for a, v in form.b_params:
        g = g * ctx.x(a, v)
    return g


def _check_field(ctx: GroupContext):
    if not (ctx.ring.is_finite and ctx.ring.is_field):
        raise ChevDiophError("Bruhat decomposition needs a finite field")


def _weyl_sorted(ctx):
    return sorted(generate_weyl(ctx.rs), key=lambda w: (w.length, w.reduced_word))


@dataclass
class BruhatOracle:
    """Exhaustive cell enumeration: every (t, u, w, u') is generated once."""

    ctx: GroupContext
    forms: dict  # element key -> list of BruhatForm

    def lookup(self, g: GroupElement) -> BruhatForm:
        found = self.forms.get(g.key, [])
        if len(found) != 1:
            raise ChevDiophError(f"{len(found)} Bruhat forms found for the element")
        return found[0]

    def census(self) -> dict:
        out: dict = {}
        for forms in self.forms.values():
            for f in forms:
                out[f.w.reduced_word] = out.get(f.w.reduced_word, 0) + 1
        return out

    def multiplicities(self) -> dict:
        out: dict = {}
        for forms in self.forms.values():
            out[len(forms)] = out.get(len(forms), 0) + 1
        return out


_ORACLES: dict = {}


def build_bruhat_oracle(ctx: GroupContext, budget: int = 10 ** 7) -> BruhatOracle:
    _check_field(ctx)
    if ctx in _ORACLES:
        return _ORACLES[ctx]
    ring, rs = ctx.ring, ctx.rs
    q = ring.size
    weyl = _weyl_sorted(ctx)
    n_t = len(ring.units()) ** rs.rank
    cost = sum(n_t * q ** rs.m * q ** len(inversion_set(ctx, w)) for w in weyl)
    if cost > budget:
        raise BudgetExceeded(f"Bruhat oracle needs {cost} products, budget {budget}")
    elems = ring.elements()
    pos = rs.positive_roots
    units_prod = list(itertools.product(ring.units(), repeat=rs.rank))
    tu = []  # (t params, a params, matrix of t*u)
    for tp in units_prod:
        tg = ctx.torus(tp)
        for ap in itertools.product(elems, repeat=len(pos)):
            g = tg
            for a, v in zip(pos, ap):
                g = g * ctx.x(a, v)
            tu.append((tp, ap, g.mat))
    tu_stack = np.stack([m for _, _, m in tu]).astype(np.int64)
    forms: dict = {}
    for w in weyl:
        lift = weyl_lift(ctx, w).mat.astype(np.int64)
        left = ring.vmatmul(tu_stack, lift[None])
        inv = set(inversion_set(ctx, w))
        for bp in itertools.product(elems, repeat=len(inv)):
            vals = iter(bp)
            b_params = tuple((a, next(vals) if a in inv else ring.zero()) for a in pos)
            right = ctx.identity()
            for a, v in b_params:
                right = right * ctx.x(a, v)
            prods = ring.vmatmul(left, right.mat.astype(np.int64)[None])
            for (tp, ap, _), m in zip(tu, prods):
                form = BruhatForm(tuple(tp), tuple(zip(pos, ap)), w, b_params)
                forms.setdefault(ctx.element(m).key, []).append(form)
    oracle = BruhatOracle(ctx, forms)
    _ORACLES[ctx] = oracle
    return oracle


def bruhat_oracle(ctx: GroupContext, g: GroupElement, budget: int = 10 ** 7) -> BruhatForm:
    return build_bruhat_oracle(ctx, budget).lookup(g)


def bruhat_decompose(ctx: GroupContext, g: GroupElement) -> BruhatForm:
    """Cell-by-cell solver.

    For each w (by increasing length) the right-hand parameters on the
    inversion set of w are tried; the remaining factor must be upper
    triangular, its diagonal gives the torus part and the unipotent part is
    read by height-ordered elimination.
    """
    _check_field(ctx)
    ring, rs = ctx.ring, ctx.rs
    pos = rs.positive_roots
    for w in _weyl_sorted(ctx):
        lift_inv = ctx.inverse(weyl_lift(ctx, w))
        inv = inversion_set(ctx, w)
        inv_set = set(inv)
        for bp in itertools.product(ring.elements(), repeat=len(inv)):
            vals = iter(bp)
            b_params = tuple((a, next(vals) if a in inv_set else ring.zero()) for a in pos)
            right_inv = ctx.identity()
            for a, v in reversed(b_params):
                right_inv = right_inv * ctx.x(a, ring.neg(v))
            m = g * right_inv * lift_inv
            if not _is_upper(ctx, m):
                continue
            tp = read_torus(ctx, _diagonal_part(ctx, m))
            if tp is None:
                continue
            u = ctx.inverse(ctx.torus(tp)) * m
            ap = read_unipotent(ctx, u, pos)
            if ap is None:
                continue
            form = BruhatForm(tuple(tp), tuple(zip(pos, ap)), w, b_params)
            if recompose_bruhat(ctx, form) == g:
                return form
    raise ChevDiophError("no Bruhat cell contains the element")


def format_bruhat(ctx: GroupContext, form: BruhatForm) -> str:
    rs, fmt = ctx.rs, ctx.ring.format
    parts = [f"h({rs.name(s)};{fmt(u)})" for s, u in zip(rs.simple_roots, form.t)]
    parts += [f"x({rs.name(a)};{fmt(v)})" for a, v in form.a_params]
    parts += [f"w({rs.name(rs.simple_roots[i])};1)" for i in form.w.reduced_word]
    parts += [f"x({rs.name(a)};{fmt(v)})" for a, v in form.b_params]
    return " * ".join(parts)


# --------------------------------------------------------------------------
# opposite-root shifts


def opposite_shift(ring, s, t=None, variant: str = "*"):
    """Parameters (c, a, b) with

    ``*``:  x_{-g}(s) x_g(t) = h_g(c) x_g(a) x_{-g}(b), c = 1/(1+st), a = t(1+st), b = s c;
    ``**``: x_g(1) x_{-g}(s) x_g(1)^{-1} = h_g(c) x_g(a) x_{-g}(b), c = 1/(1-s), a = s^2-s, b = s c.
    """
    if variant == "*":
        d = ring.add(ring.one(), ring.mul(s, t))
        if not ring.is_unit(d):
            raise NonUnitDenominator(f"1+st = {ring.format(d)} is not a unit")
        c = ring.inv(d)
        return c, ring.mul(t, d), ring.mul(s, c)
    if variant == "**":
        d = ring.sub(ring.one(), s)
        if not ring.is_unit(d):
            raise NonUnitDenominator(f"1-s = {ring.format(d)} is not a unit")
        c = ring.inv(d)
        return c, ring.sub(ring.mul(s, s), s), ring.mul(s, c)
    raise ValueError(f"unknown variant {variant!r}")


def opposite_shift_holds(ctx: GroupContext, g: Root, s, t=None, variant: str = "*") -> bool:
    ring = ctx.ring
    c, a, b = opposite_shift(ring, s, t, variant)
    ng = ctx.rs.neg(g)
    rhs = ctx.h(g, c) * ctx.x(g, a) * ctx.x(ng, b)
    if variant == "*":
        lhs = ctx.x(ng, s) * ctx.x(g, t)
    else:
        lhs = ctx.conjugate(ctx.x(ng, s), ctx.x(g, 1))
    return lhs == rhs


# --------------------------------------------------------------------------
# Gauss (UTV) decomposition


@dataclass(frozen=True)
class UTVForm:
    r_params: tuple  # (root, value), positive roots in increasing height
    t: tuple  # simple-root torus parameters
    s_params: tuple  # (root, value), negative roots -a_m ... -a_1


class NotInBigCell:
    """Outcome marker: the element has no U T V factorization."""

    def __repr__(self):
        return "NotInBigCell"

    def __bool__(self):
        return False


NOT_IN_BIG_CELL = NotInBigCell()


def v_roots(ctx: GroupContext) -> list:
    """Negative roots in the V-side order: -a_m, ..., -a_1."""
    return [ctx.rs.neg(a) for a in reversed(ctx.rs.positive_roots)]


def recompose_utv(ctx: GroupContext, form: UTVForm) -> GroupElement:
    g = ctx.identity()
    for a, v in form.r_params:
        g = g * ctx.x(a, v)
    g = g * ctx.torus(form.t)
    for a, v in form.s_params:
        g = g * ctx.x(a, v)
    return g


def _udl(ctx: GroupContext, rows):
    """Matrix factorization rows = U D L with unit pivots, or None."""
    ring = ctx.ring
    n = len(rows)
    # reverse the index order so the problem becomes an LDU factorization
    a = [[rows[n - 1 - r][n - 1 - c] for c in range(n)] for r in range(n)]
    lower = [[ring.from_int(int(r == c)) for c in range(n)] for r in range(n)]
    diag = []
    for k in range(n):
        piv = a[k][k]
        if not ring.is_unit(piv):
            return None
        pinv = ring.inv(piv)
        diag.append(piv)
        for i in range(k + 1, n):
            f = ring.mul(a[i][k], pinv)
            lower[i][k] = f
            if f != ring.zero():
                for j in range(k, n):
                    a[i][j] = ring.sub(a[i][j], ring.mul(f, a[k][j]))
        for j in range(k, n):
            a[k][j] = ring.mul(a[k][j], pinv)
    zero = ring.zero()
    upper_part = [[lower[n - 1 - r][n - 1 - c] for c in range(n)] for r in range(n)]
    lower_part = [[a[n - 1 - r][n - 1 - c] for c in range(n)] for r in range(n)]
    d_part = [[diag[n - 1 - r] if r == c else zero for c in range(n)] for r in range(n)]
    return upper_part, d_part, lower_part


def utv_decompose(ctx: GroupContext, g, max_word_length: int = 10 ** 5):
    """UTVForm for elements of the big cell, otherwise NOT_IN_BIG_CELL.

    ``g`` may be a :class:`GroupElement` or a word in generator literals.
    """
    if isinstance(g, str):
        node = parse_word_text(g, constants=ctx.ring.constants())
        if len(g) > max_word_length:
            raise RewriteDivergence(f"word longer than {max_word_length} characters")
        g = ctx.evaluate(node)
    parts = _udl(ctx, g.rows())
    if parts is None:
        return NOT_IN_BIG_CELL
    up, dg, lo = (ctx.from_rows(p) for p in parts)
    tp = read_torus(ctx, dg)
    if tp is None:
        return NOT_IN_BIG_CELL
    rp = read_unipotent(ctx, up, ctx.rs.positive_roots)
    sp = read_unipotent(ctx, lo, v_roots(ctx))
    if rp is None or sp is None:
        return NOT_IN_BIG_CELL
    form = UTVForm(tuple(zip(ctx.rs.positive_roots, rp)), tuple(tp), tuple(zip(v_roots(ctx), sp)))
    if recompose_utv(ctx, form) != g:
        return NOT_IN_BIG_CELL
    return form


def format_utv(ctx: GroupContext, form: UTVForm) -> str:
    rs, fmt = ctx.rs, ctx.ring.format
    parts = [f"x({rs.name(a)};{fmt(v)})" for a, v in form.r_params]
    parts += [f"h({rs.name(s)};{fmt(u)})" for s, u in zip(rs.simple_roots, form.t)]
    parts += [f"x({rs.name(a)};{fmt(v)})" for a, v in form.s_params]
    return " * ".join(parts)


# --------------------------------------------------------------------------
# CRT splitting of group elements


def factor_contexts(ctx: GroupContext) -> list:
    if not isinstance(ctx.ring, IntegersModN):
        raise ChevDiophError("CRT splitting needs a Z/n context")
    return [make_context(ctx.rs, ctx.rep.kind, f) for f in crt_split(ctx.ring).factors]


def group_crt_split(ctx: GroupContext, g: GroupElement) -> tuple:
    out = []
    for fctx in factor_contexts(ctx):
        out.append(fctx.element(np.asarray(g.mat, dtype=np.int64) % fctx.ring.n))
    return tuple(out)


def group_crt_combine(ctx: GroupContext, parts) -> GroupElement:
    split = crt_split(ctx.ring)
    mats = [np.asarray(p.mat, dtype=np.int64) for p in parts]
    out = np.zeros_like(mats[0])
    for r in range(ctx.dim):
        for c in range(ctx.dim):
            out[r, c] = split.combine([int(m[r, c]) for m in mats])
    return ctx.element(out)
