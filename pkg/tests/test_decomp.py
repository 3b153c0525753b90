import itertools

import numpy as np
import pytest

from chevdioph.decomp import (NOT_IN_BIG_CELL, bruhat_decompose, format_bruhat, format_utv,
                              group_crt_combine, group_crt_split, opposite_shift, opposite_shift_holds,
                              recompose_bruhat, utv_decompose)
from chevdioph.errors import ChevDiophError, NonUnitDenominator, RewriteDivergence
from chevdioph.group import make_context
from chevdioph.rings import make_ring
from chevdioph.tables import group_table


@pytest.mark.parametrize("system,kind,ring", [("A2", "sl", "GF(3)"), ("A2", "sl", "GF(4)"),
                                              ("C2", "sp", "GF(3)"), ("G2", "adjoint", "GF(2)")])
def test_bruhat_recomposes(system, kind, ring):
    ctx = make_context(system, kind, ring)
    table = group_table(ctx)
    for i in np.linspace(0, table.size - 1, 25, dtype=int):
        g = table.element(int(i))
        form = bruhat_decompose(ctx, g)
        assert recompose_bruhat(ctx, form) == g
        assert ctx.parse_element(format_bruhat(ctx, form)) == g


def test_bruhat_needs_a_field():
    ctx = make_context("A2", "sl", "Z/4")
    with pytest.raises(ChevDiophError):
        bruhat_decompose(ctx, ctx.identity())


def test_shift_formulas():
    ring = make_ring("Z/9")
    assert opposite_shift(ring, 1, 1) == (5, 2, 5)  # 1/2 = 5 in Z/9
    with pytest.raises(NonUnitDenominator):
        opposite_shift(ring, 2, 4)  # 1 + 8 = 0
    with pytest.raises(NonUnitDenominator):
        opposite_shift(ring, 4, variant="**")  # 1 - 4 = -3
    ctx = make_context("A2", "sl", "Z/9")
    for s, t in itertools.product(range(9), repeat=2):
        if ring.is_unit(ring.add(1, s * t)):
            assert opposite_shift_holds(ctx, ctx.rs.simple_roots[0], s, t)


def test_utv_round_trip_and_big_cell():
    ctx = make_context("A2", "sl", "Z/8")
    word = "x(a2;3) x(a1;5) x(a1+a2;1) h(a1;3) h(a2;7) x(-a1-a2;2) x(-a1;4) x(-a2;6)"
    form = utv_decompose(ctx, word)
    assert form is not NOT_IN_BIG_CELL
    assert ctx.parse_element(format_utv(ctx, form)) == ctx.parse_element(word)
    assert utv_decompose(ctx, ctx.w("a1", 1)) is NOT_IN_BIG_CELL
    assert not NOT_IN_BIG_CELL
    with pytest.raises(RewriteDivergence):
        utv_decompose(ctx, "x(a1;1) " * 10, max_word_length=20)


def test_crt_split_and_combine():
    ctx = make_context("C2", "sp", "Z/6")
    g = ctx.parse_element("x(a1;5) w(a2;1) x(-a1-a2;2) h(a1;5)")
    parts = group_crt_split(ctx, g)
    assert [p.ctx.ring.name for p in parts] == ["Z/2", "Z/3"]
    assert parts[1] == parts[1].ctx.parse_element("x(a1;2) w(a2;1) x(-a1-a2;2) h(a1;2)")
    assert group_crt_combine(ctx, parts) == g
    with pytest.raises(ChevDiophError):
        group_crt_split(make_context("C2", "sp", "GF(4)"), g)
