import numpy as np
import pytest

from chevdioph.chevalley import (build_chevalley_basis, build_representation, coroot_matrix,
                                 derive_commutator_table, export_table, import_table, peel_commutator)
from chevdioph.errors import KindMismatch, ParseError, UnknownConvention
from chevdioph.rootsys import build_root_system


@pytest.mark.parametrize("name", ["A2", "B3", "C3", "G2"])
def test_structure_constants_antisymmetric_and_bounded(name):
    rs = build_root_system(name)
    basis = build_chevalley_basis(rs)
    for a in rs.all_roots:
        for b in rs.all_roots:
            n = basis.n(a, b)
            if rs.add(a, b) is None:
                assert n is None
                continue
            assert n == -basis.n(b, a)
            # |N_ab| = p + 1 where p is how far b can go down the a-string
            p = 0
            while rs.combine(-(p + 1), a, 1, b) is not None:
                p += 1
            assert abs(n) == p + 1


@pytest.mark.parametrize("name,kind,dim", [("A2", "adjoint", 8), ("A3", "sl", 4), ("C2", "sp", 4),
                                           ("C3", "sp", 6), ("G2", "adjoint", 14)])
def test_representation_brackets(name, kind, dim):
    rs = build_root_system(name)
    rep = build_representation(rs, kind)
    basis = rep.basis
    assert rep.dim == dim
    for a in rs.all_roots:
        ea = rep.e(a)
        # [e_a, e_-a] = h_a acts on the weights by the coroot pairing
        bracket = ea @ rep.e(rs.neg(a)) - rep.e(rs.neg(a)) @ ea
        assert np.array_equal(bracket, coroot_matrix(rep, a))
        for b in rs.all_roots:
            s = rs.add(a, b)
            if s is None or b == rs.neg(a):
                continue
            lhs = ea @ rep.e(b) - rep.e(b) @ ea
            assert np.array_equal(lhs, basis.n(a, b) * rep.e(s))


def test_divided_powers_terminate_integrally():
    rep = build_representation(build_root_system("G2"), "adjoint")
    for a in rep.rs.all_roots:
        powers = rep.powers(a)
        assert len(powers) == (4 if not rep.rs.is_long(a) else 3)
        assert all(p.dtype.kind == "i" for p in powers)


def test_kind_and_convention_errors():
    with pytest.raises(KindMismatch):
        build_representation(build_root_system("B2"), "sl")
    with pytest.raises(KindMismatch):
        build_representation(build_root_system("A3"), "sp")
    with pytest.raises(UnknownConvention):
        build_chevalley_basis(build_root_system("A2"), "made-up")


def test_b2_commutator_shape():
    rs = build_root_system("B2")
    rep = build_representation(rs, "adjoint")
    long_, short = (r for r in sorted(rs.simple_roots, key=lambda r: not rs.is_long(r)))
    coeffs = peel_commutator(rep, long_, short)
    assert [(i, j, abs(c)) for i, j, c in coeffs] == [(1, 1, 1), (1, 2, 1)]


def test_commutator_table_independent_of_representation():
    # structure constants and commutator coefficients agree between adjoint and natural forms
    rs = build_root_system("C2")
    ad = derive_commutator_table(build_representation(rs, "adjoint"))
    sp = derive_commutator_table(build_representation(rs, "sp"))
    assert ad.entries == sp.entries


def test_table_export_import_round_trip():
    rs = build_root_system("G2")
    basis = build_chevalley_basis(rs)
    comm = derive_commutator_table(build_representation(rs, "adjoint"))
    text = export_table(basis, comm)
    assert text.startswith("chevtab v1 G2 extraspecial-v1\n")
    imported = import_table(text)
    assert imported.system == "G2"
    assert len(imported.N) == len(basis.N)
    for (ia, ib), v in basis.N.items():
        assert imported.N[(rs.all_roots[ia].coords, rs.all_roots[ib].coords)] == v
    assert export_table(basis, comm) == text


@pytest.mark.parametrize("bad", ["", "chevtab v2 A2 x\n", "chevtab v1 A2 extraspecial-v1\nN [1,-1,0]\n"])
def test_import_rejects_malformed(bad):
    with pytest.raises(ParseError):
        import_table(bad)
