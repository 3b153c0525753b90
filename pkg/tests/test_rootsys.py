import pytest

from chevdioph.errors import IllegalRank, ParseError
from chevdioph.rootsys import (build_root_system, cartan_pairing, generate_weyl, highest_root,
                               parse_root_vector, reflect, weyl_from_word)

COUNTS = {"A2": (6, 6), "A3": (12, 24), "B2": (8, 8), "C2": (8, 8), "B3": (18, 48), "C3": (18, 48),
          "D4": (24, 192), "G2": (12, 12), "F4": (48, 1152)}


@pytest.mark.parametrize("name", sorted(COUNTS))
def test_root_and_weyl_counts(name):
    rs = build_root_system(name)
    n_roots, weyl_order = COUNTS[name]
    assert len(rs) == n_roots
    assert len(rs.positive_roots) == n_roots // 2
    assert len(generate_weyl(rs)) == weyl_order


def test_g2_positive_roots_and_highest():
    rs = build_root_system("G2")
    names = [rs.name(r) for r in rs.positive_roots]
    assert names == ["a2", "a1", "a1+a2", "2a1+a2", "3a1+a2", "3a1+2a2"]
    assert rs.name(highest_root(rs)) == "3a1+2a2"
    assert not rs.is_long(rs.simple_roots[0]) and rs.is_long(rs.simple_roots[1])


@pytest.mark.parametrize("bad", ["A1", "D3", "E5", "F3", "G3", "X2", "B1"])
def test_illegal_ranks(bad):
    with pytest.raises(IllegalRank):
        build_root_system(bad)


@pytest.mark.parametrize("name", ["A3", "C3", "G2"])
def test_reflections_are_involutions_and_cartan_integral(name):
    rs = build_root_system(name)
    for a in rs.all_roots:
        assert reflect(rs, a, a) == rs.neg(a)
        for b in rs.all_roots:
            assert reflect(rs, a, reflect(rs, a, b)) == b
            assert isinstance(cartan_pairing(b, a), int)
            assert -3 <= cartan_pairing(b, a) <= 3


def test_root_names_parse_back():
    for name in ("B3", "C2", "G2"):
        rs = build_root_system(name)
        for r in rs.all_roots:
            assert rs.parse_root(rs.name(r)) == r


def test_euclidean_and_coordinate_syntax():
    rs = build_root_system("C2")
    assert rs.parse_root("2e1") == rs.parse_root("[2,0]")
    assert rs.is_long(rs.parse_root("2e1"))
    assert not rs.is_long(rs.parse_root("e1+e2"))
    with pytest.raises(ParseError):
        rs.parse_root("3e1")
    assert parse_root_vector("a1+a2", rs) == rs.add(*rs.simple_roots).coords


def test_weyl_words_are_reduced_and_consistent():
    rs = build_root_system("B3")
    elems = generate_weyl(rs)
    longest = max(elems, key=lambda w: w.length)
    assert longest.length == len(rs.positive_roots)
    for w in elems[:40]:
        assert weyl_from_word(rs, w.reduced_word).perm == w.perm
    # the longest element sends every positive root to a negative one
    assert all(not longest.apply(rs, a).is_positive for a in rs.positive_roots)
