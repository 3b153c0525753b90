"""Batched evaluation of group words and exhaustive solving of word equations.

An equation is a pair of word nodes ``(lhs, rhs)``.  Values carried through
the search are ``(M, M^-1)`` stacks so that no matrix inversion is needed
beyond a one-time pass over the enumerated group.
"""

from __future__ import annotations


import numpy as np

from .errors import ChevDiophError, UnknownSymbol
from .grammar import Comm, Lit, Mul, One, Pow, Var, variables_of
from .group import GroupContext, GroupElement, GroupTable
from .search import Constraint, SearchResult, run_search


def equation_variables(eq) -> frozenset:
    lhs, rhs = eq
    return frozenset(variables_of(lhs)) | frozenset(variables_of(rhs))


class BatchEvaluator:
    def __init__(self, ctx: GroupContext):
        if not ctx.ring.is_finite:
            raise ChevDiophError("batched evaluation needs a finite ring")
        self.ctx = ctx
        self.n = ctx.dim
        self._consts: dict = {}
        ident = ctx.identity().mat.astype(np.int64)[None]
        self.identity = (ident, ident)

    def mul(self, a, b):
        mm = self.ctx.ring.vmatmul
        return mm(a[0], b[0]), mm(b[1], a[1])

    def constant(self, node: Lit):
        if node not in self._consts:
            g = self.ctx.evaluate(node)
            inv = self.ctx.inverse(g)
            self._consts[node] = (np.asarray(g.mat, dtype=np.int64)[None],
                                  np.asarray(inv.mat, dtype=np.int64)[None])
        return self._consts[node]

    def eval(self, node, env):
        if isinstance(node, One):
            return self.identity
        if isinstance(node, Var):
            if node.name not in env:
                raise UnknownSymbol(f"unassigned group variable {node.name!r}")
            return env[node.name]
        if isinstance(node, Lit):
            return self.constant(node)
        if isinstance(node, Pow):
            base = self.eval(node.base, env)
            if node.exp < 0:
                base = (base[1], base[0])
            out = self.identity
            for _ in range(abs(node.exp)):
                out = self.mul(out, base)
            return out
        if isinstance(node, Comm):
            a = self.eval(node.left, env)
            b = self.eval(node.right, env)
            return self.mul(self.mul(a, b), self.mul((a[1], a[0]), (b[1], b[0])))
        if isinstance(node, Mul):
            out = self.identity
            for f in node.factors:
                out = self.mul(out, self.eval(f, env))
            return out
        raise TypeError(node)


def _batch_inverse(ctx: GroupContext, mats: np.ndarray) -> np.ndarray:
    ring = ctx.ring
    form = ctx.rep.form
    if form is not None:
        q = np.asarray(form, dtype=np.int64) % ring.size
        qneg = ring.vneg(q)
        return ring.vmatmul(ring.vmatmul(qneg[None], np.swapaxes(mats, 1, 2)), q[None])
    ident = ctx.identity().mat.astype(np.int64)
    out = np.empty_like(mats)
    done = np.zeros(len(mats), dtype=bool)
    prev = np.broadcast_to(ident, mats.shape).copy()
    power = mats.copy()
    for _ in range(100_000):
        hit = np.all((power == ident).reshape(len(mats), -1), axis=1) & ~done
        out[hit] = prev[hit]
        done |= hit
        if done.all():
            return out
        prev = power
        power = ring.vmatmul(power, mats)
    raise ChevDiophError("element orders too large to invert by powering")


def table_values(table: GroupTable):
    """(M, M^-1) stacks for every element of the table, computed once."""
    cached = getattr(table, "_values", None)
    if cached is None:
        mats = table.elements.astype(np.int64)
        inv = np.empty_like(mats)
        for start in range(0, len(mats), 100_000):
            inv[start:start + 100_000] = _batch_inverse(table.ctx, mats[start:start + 100_000])
        cached = (mats, inv)
        object.__setattr__(table, "_values", cached)
    return cached


def _equal_mask(a, b, n):
    eq = np.all((a == b).reshape(max(len(a), len(b)), -1), axis=1)
    return np.broadcast_to(eq, (n,))


def _broadcast(value, n):
    return tuple(np.broadcast_to(a, (n,) + a.shape[1:]) if len(a) == 1 and n != 1 else a for a in value)


def word_constraints(ev: BatchEvaluator, equations) -> list:
    out = []
    for lhs, rhs in equations:
        variables = equation_variables((lhs, rhs))

        def check(env, n, lhs=lhs, rhs=rhs):
            return _equal_mask(ev.eval(lhs, env)[0], ev.eval(rhs, env)[0], n)

        definers = {}
        for side, other in ((lhs, rhs), (rhs, lhs)):
            if isinstance(side, Var) and side.name not in variables_of(other):
                definers[side.name] = (lambda env, n, other=other: _broadcast(ev.eval(other, env), n))
        out.append(Constraint(variables, check, definers))
    return out


def solve_word_equations(table: GroupTable, variables, equations, *, count=False,
                         project=None, budget=None) -> SearchResult:
    """Exhaustive solver for ``lhs = rhs`` word equations over an enumerated group."""
    ctx = table.ctx
    ev = BatchEvaluator(ctx)
    constraints = word_constraints(ev, equations)
    full = table_values(table)

    def domain(v, unary):
        if not unary:
            return full
        mask = np.ones(len(full[0]), dtype=bool)
        for c in unary:
            idx = np.nonzero(mask)[0]
            sub = (full[0][idx], full[1][idx])
            mask[idx[~np.asarray(c.check({v: sub}, len(idx)), dtype=bool)]] = False
        idx = np.nonzero(mask)[0]
        return (full[0][idx], full[1][idx])

    def key_of(value):
        return value[0][0].astype(np.int64).tobytes()

    return run_search(variables, constraints, domain, count=count, project=project,
                      budget=budget, key_of=key_of)


def witness_elements(ctx: GroupContext, witness: dict) -> dict:
    return {v: GroupElement(ctx, val[0][0].astype(np.int64), val[1][0].astype(np.int64))
            for v, val in witness.items()}


def check_assignment(ctx: GroupContext, equations, assignment: dict) -> bool:
    """Direct (non-batched) evaluation of every equation."""
    return all(ctx.evaluate(lhs, assignment) == ctx.evaluate(rhs, assignment) for lhs, rhs in equations)
