"""Exhaustive, vectorized search over assignments of finite structures.

Assignments are extended one variable at a time in batches.  After each
extension every equation whose variables are all assigned is checked and
failing rows are dropped, and variables determined by an equation of the
form ``v = expr`` are computed instead of enumerated.  Values are tuples of
numpy arrays whose leading axis indexes the batch rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetExceeded

CHUNK_ROWS = 1 << 18


@dataclass
class Constraint:
    """One equation: ``check(env, n)`` gives a row mask; ``definers[v](env, n)`` solves for v."""

    variables: frozenset
    check: Callable
    definers: dict = field(default_factory=dict)
    label: str = ""


@dataclass
class SearchResult:
    satisfiable: bool
    witness: dict | None  # var -> tuple of scalar arrays (one row)
    count: int | None
    projected: set | None
    explored: int

    @property
    def status(self) -> str:
        return "SAT" if self.satisfiable else "UNSAT"


def _take(value, idx):
    return tuple(a[idx] for a in value)


def _repeat(value, k):
    return tuple(np.repeat(a, k, axis=0) for a in value)


def _tile(value, k):
    return tuple(np.tile(a, (k,) + (1,) * (a.ndim - 1)) for a in value)


def _rows(value):
    return len(value[0])


class _Stop(Exception):
    pass


def plan_search(variables, constraints, domain_size):
    """Order of enumeration, definition and check steps.

    Unary constraints of enumerated variables are folded into their domains.
    Returns the step list and, per enumerated variable, its unary constraints.
    """
    assigned: set = set()
    used: set = set()
    steps: list = []
    unary: dict = {v: [i for i, c in enumerate(constraints) if c.variables == {v}] for v in variables}
    order = {v: k for k, v in enumerate(variables)}

    def propagate():
        changed = True
        while changed:
            changed = False
            for i, c in enumerate(constraints):
                if i in used:
                    continue
                rest = c.variables - assigned
                if not rest:
                    steps.append(("check", i))
                    used.add(i)
                    changed = True
                elif len(rest) == 1:
                    (v,) = rest
                    if v in c.definers:
                        steps.append(("define", v, i))
                        assigned.add(v)
                        used.add(i)
                        changed = True

    propagate()
    while len(assigned) < len(variables):
        best = None
        for v in variables:
            if v in assigned:
                continue
            open_ = [len(c.variables - assigned - {v}) for i, c in enumerate(constraints)
                     if i not in used and v in c.variables]
            gain = sum(1 for r in open_ if r <= 1)
            nearest = min(open_, default=len(variables))
            key = (domain_size(v, [constraints[i] for i in unary[v]]), -gain, nearest, order[v])
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        folded = [i for i in unary[v] if i not in used]
        used.update(folded)
        steps.append(("enum", v, folded))
        assigned.add(v)
        propagate()
    return steps


def run_search(variables, constraints, domain, *, count=False, project=None,
               budget=None, key_of=None, extend=None) -> SearchResult:
    """Enumerate all assignments satisfying every constraint.

    ``domain(v, unary_constraints)`` returns the filtered value tuple for v.
    With ``count`` all solutions are counted; with ``project`` (a list of
    variables) the distinct projections are collected via ``key_of``;
    otherwise the search stops at the first solution.  ``extend(env, n)``, when
    given, maps each batch of complete assignments of ``variables`` to a batch
    over a larger variable set (it may drop or multiply rows).
    """
    variables = list(variables)
    domains: dict = {}

    def get_domain(v, unary):
        if v not in domains:
            domains[v] = domain(v, unary)
        return domains[v]

    steps = plan_search(variables, constraints, lambda v, u: _rows(get_domain(v, u)))
    state = {"explored": 0, "count": 0, "witness": None, "projected": set() if project else None}
    exhaustive = count or bool(project)

    def finish(env, n):
        if extend is not None and n:
            env, n = extend(env, n)
        if n == 0:
            return
        state["count"] += n
        if state["witness"] is None:
            state["witness"] = {v: _take(val, slice(0, 1)) for v, val in env.items()}
        if project:
            for r in range(n):
                state["projected"].add(tuple(key_of(_take(env[v], slice(r, r + 1))) for v in project))
        if not exhaustive:
            raise _Stop

    def step(k, env, n):
        while k < len(steps) and n:
            kind = steps[k][0]
            if kind == "check":
                c = constraints[steps[k][1]]
                mask = np.broadcast_to(np.asarray(c.check(env, n), dtype=bool), (n,))
                if not mask.all():
                    idx = np.nonzero(mask)[0]
                    env = {v: _take(val, idx) for v, val in env.items()}
                    n = len(idx)
            elif kind == "define":
                _, v, i = steps[k]
                env = dict(env)
                env[v] = constraints[i].definers[v](env, n)
            else:
                _, v, folded = steps[k]
                dom = get_domain(v, [constraints[i] for i in folded])
                d = _rows(dom)
                if d == 0:
                    return
                per = max(1, CHUNK_ROWS // d)
                for start in range(0, n, per):
                    stop = min(n, start + per)
                    m = stop - start
                    state["explored"] += m * d
                    if budget is not None and state["explored"] > budget:
                        raise BudgetExceeded(f"more than {budget} candidate assignments")
                    sub = {u: _repeat(_take(val, slice(start, stop)), d) for u, val in env.items()}
                    sub[v] = _tile(dom, m)
                    step(k + 1, sub, m * d)
                return
            k += 1
        finish(env, n)

    try:
        step(0, {}, 1)
    except _Stop:
        pass
    sat = state["count"] > 0
    return SearchResult(sat, state["witness"], state["count"] if count else None,
                        state["projected"], state["explored"])
