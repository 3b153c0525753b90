import pytest

from chevdioph.dioph import (default_carrier, double_centralizer_report, e_define_subgroup, gamma_set,
                             interpreted_ring_ops, parse_carrier, predicted_roots, verify_ring_isomorphism,
                             y_carrier)
from chevdioph.errors import TargetUnavailable
from chevdioph.group import make_context
from chevdioph.reduce import GroupSystem, parse_system
from chevdioph.tables import group_table


def _names(ctx, roots):
    return sorted(ctx.rs.name(r) for r in roots)


def test_gamma_sets():
    sl3 = make_context("A2", "sl", "GF(3)")
    assert _names(sl3, gamma_set(sl3, "a1").members) == ["-a2", "a1", "a1+a2"]
    sp4 = make_context("C2", "sp", "GF(3)")
    assert _names(sp4, gamma_set(sp4, "e1+e2").members) == ["2a1+a2", "a1+a2", "a2"]
    # in characteristic 2 the short-root commutator [x_{e1+e2}, x_{e1-e2}] vanishes
    sp4_2 = make_context("C2", "sp", "GF(2)")
    assert len(gamma_set(sp4_2, "e1+e2")) > len(gamma_set(sp4, "e1+e2"))


def test_predicted_forms():
    sp4 = make_context("C2", "sp", "GF(3)")
    rs = sp4.rs
    assert _names(sp4, predicted_roots(rs, rs.parse_root("e1+e2"))) == ["2a1+a2", "a1+a2", "a2"]
    assert _names(sp4, predicted_roots(rs, rs.parse_root("2e1"))) == ["2a1+a2"]


@pytest.mark.parametrize("system,kind,ring,root,size", [("A2", "sl", "GF(3)", "a1", 3),
                                                       ("C2", "sp", "GF(3)", "e1+e2", 54),
                                                       ("C2", "sp", "GF(3)", "2e1", 6),
                                                       ("A2", "sl", "Z/4", "a2", 4)])
def test_double_centralizer_equal(system, kind, ring, root, size):
    report = double_centralizer_report(group_table(make_context(system, kind, ring)), root)
    assert report.equal and report.contained
    assert len(report.computed) == size


def test_double_centralizer_char_two_short_root():
    report = double_centralizer_report(group_table(make_context("C2", "sp", "GF(2)")), "e1+e2")
    assert report.verdict == "unequal"
    assert report.contained  # the computed set is still inside the predicted form
    assert (len(report.computed), len(report.predicted)) == (2, 8)


@pytest.mark.parametrize("target", ["Xa1", "Xa2", "X-a1-a2", "X2a1+a2"])
def test_root_subgroups_defined(target):
    ctx = make_context("C2", "sp", "GF(3)")
    formula = e_define_subgroup(ctx, target)
    got = formula.solution_set(group_table(ctx))
    assert got == {g.mat.astype("int64").tobytes() for g in parse_carrier(ctx, target).elements(ctx)}


def test_formula_text_is_a_group_system():
    ctx = make_context("A2", "sl", "GF(3)")
    formula = e_define_subgroup(ctx, "Xa1+a2")
    system = parse_system(formula.to_text())
    assert isinstance(system, GroupSystem)
    assert system.variables == formula.variables
    assert system.to_text() == formula.to_text()


def test_y_regime():
    assert default_carrier(make_context("C2", "sp", "GF(2)")).name == "Y"
    assert default_carrier(make_context("C2", "sp", "GF(3)")).name == "Xa1+a2"
    ctx = make_context("C2", "sp", "Z/4")
    y = y_carrier(ctx)
    elems = y.elements(ctx)
    assert len({g.key for g in elems}) == 4
    assert all(y.read(ctx, g) == t for t, g in zip(ctx.ring.elements(), elems))
    with pytest.raises(TargetUnavailable):
        y_carrier(make_context("A2", "sl", "GF(2)"))


@pytest.mark.parametrize("system,kind,ring,carrier,case", [
    ("A2", "sl", "Z/6", None, 1), ("A3", "sl", "Z/4", None, 1), ("B3", "adjoint", "GF(2)", None, 1),
    ("G2", "adjoint", "GF(3)", None, 2), ("C2", "sp", "Z/9", None, 3), ("B2", "adjoint", "GF(3)", None, 3),
    ("C2", "sp", "GF(4)", "Y", 4), ("C2", "sp", "GF(2)", None, 4)])
def test_interpretations(system, kind, ring, carrier, case):
    ctx = make_context(system, kind, ring)
    assert interpreted_ring_ops(ctx, carrier).case == case
    report = verify_ring_isomorphism(ctx, carrier)
    assert report.ok, report.failures[:3]
    assert report.pairs == ctx.ring.size ** 2
