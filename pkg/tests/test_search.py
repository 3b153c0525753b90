import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chevdioph.errors import BudgetExceeded
from chevdioph.search import Constraint, plan_search, run_search

DOM = (np.arange(10),)


def _domain(v, unary):
    vals = DOM[0]
    for c in unary:
        vals = vals[np.asarray(c.check({v: (vals,)}, len(vals)), dtype=bool)]
    return (vals,)


def _sum_is(a, b, total, define=True):
    def check(env, n):
        return (env[a][0] + env[b][0]) % 10 == total

    definers = {}
    if define:
        definers[b] = lambda env, n: (np.broadcast_to((total - env[a][0]) % 10, (n,)),)
    return Constraint(frozenset({a, b}), check, definers)


def test_count_with_and_without_definers():
    for define in (True, False):
        res = run_search(["a", "b"], [_sum_is("a", "b", 9, define)], _domain, count=True)
        assert res.count == 10 and res.satisfiable


def test_first_solution_stops_early():
    res = run_search(["a", "b"], [_sum_is("a", "b", 3)], _domain)
    assert res.satisfiable and res.count is None
    assert (res.witness["a"][0][0] + res.witness["b"][0][0]) % 10 == 3


def test_unsat_and_projection():
    odd = Constraint(frozenset({"a"}), lambda env, n: env["a"][0] % 2 == 1)
    even = Constraint(frozenset({"a"}), lambda env, n: env["a"][0] % 2 == 0)
    assert run_search(["a"], [odd, even], _domain).status == "UNSAT"
    res = run_search(["a", "b"], [odd, _sum_is("a", "b", 0)], _domain, project=["b"],
                     key_of=lambda val: int(val[0][0]))
    assert res.projected == {(1,), (3,), (5,), (7,), (9,)}


def test_budget():
    with pytest.raises(BudgetExceeded):
        run_search(["a", "b", "c"], [], _domain, count=True, budget=50)


def test_planner_uses_definers_before_enumerating():
    steps = plan_search(["a", "b"], [_sum_is("a", "b", 9)], lambda v, u: 10)
    kinds = [s[0] for s in steps]
    assert kinds.count("define") == 1
    assert sum(1 for s in steps if s[0] not in ("check", "define")) == 1


def test_extend_hook_multiplies_rows():
    def extend(env, n):
        out = {k: (np.repeat(v[0], 2),) for k, v in env.items()}
        out["z"] = (np.tile(np.array([0, 1]), n),)
        return out, 2 * n

    res = run_search(["a"], [], _domain, count=True, extend=extend)
    assert res.count == 20 and "z" in res.witness


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc"), st.integers(0, 9)),
                min_size=1, max_size=4))
def test_counts_match_itertools(specs):
    constraints = [_sum_is(a, b, t, define=a != b) for a, b, t in specs]
    res = run_search(["a", "b", "c"], constraints, _domain, count=True)
    want = sum(all((env[a] + env[b]) % 10 == t for a, b, t in specs)
               for env in (dict(zip("abc", vals)) for vals in itertools.product(range(10), repeat=3)))
    assert res.count == want
