import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chevdioph.errors import BadModulus, InfiniteRing, NonUnitParameter, NotLocal, ParseError
from chevdioph.rings import (crt_split, default_modulus, enumerate_ring, factorize, is_irreducible,
                             make_ring, parse_ring_spec, radical_membership)

FINITE = ["Z/2", "Z/4", "Z/6", "Z/8", "Z/9", "Z/12", "GF(2)", "GF(3)", "GF(4)", "GF(5)", "GF(8)", "GF(9)",
          "GF(2^2;f=x^2+x+1)"]


@st.composite
def ring_and_elements(draw, k=3):
    ring = make_ring(draw(st.sampled_from(FINITE)))
    elems = ring.elements()
    return (ring,) + tuple(draw(st.sampled_from(elems)) for _ in range(k))


@given(ring_and_elements())
def test_commutative_ring_axioms(data):
    r, a, b, c = data
    assert r.add(a, b) == r.add(b, a)
    assert r.mul(a, b) == r.mul(b, a)
    assert r.add(r.add(a, b), c) == r.add(a, r.add(b, c))
    assert r.mul(r.mul(a, b), c) == r.mul(a, r.mul(b, c))
    assert r.mul(a, r.add(b, c)) == r.add(r.mul(a, b), r.mul(a, c))
    assert r.add(a, r.neg(a)) == r.zero()
    assert r.mul(a, r.one()) == a


@given(ring_and_elements(k=1))
def test_units_invert(data):
    r, a = data
    if r.is_unit(a):
        assert r.mul(a, r.inv(a)) == r.one()
    else:
        with pytest.raises(NonUnitParameter):
            r.inv(a)


@given(ring_and_elements(k=1))
def test_format_parse_round_trip(data):
    r, a = data
    assert r.parse(r.format(a)) == a


@settings(max_examples=50)
@given(st.sampled_from(FINITE), st.integers(0, 2 ** 32 - 1))
def test_vector_ops_match_scalar(spec, seed):
    r = make_ring(spec)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, r.size, 16)
    b = rng.integers(0, r.size, 16)
    assert list(r.vadd(a, b)) == [r.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(r.vmul(a, b)) == [r.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(r.vneg(a)) == [r.neg(int(x)) for x in a]
    m1 = rng.integers(0, r.size, (2, 3, 3))
    m2 = rng.integers(0, r.size, (2, 3, 3))
    prod = r.vmatmul(m1, m2)
    for k in range(2):
        for i in range(3):
            for j in range(3):
                want = r.zero()
                for t in range(3):
                    want = r.add(want, r.mul(int(m1[k, i, t]), int(m2[k, t, j])))
                assert prod[k, i, j] == want


@given(st.integers(2, 10 ** 6))
def test_factorize(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert factorize(p) == {p: 1}
        prod *= p ** e
    assert prod == n


@given(st.sampled_from([6, 10, 12, 30, 36, 60]), st.integers(0, 10 ** 6))
def test_crt_combine_inverts_project(n, a):
    split = crt_split(make_ring(f"Z/{n}"))
    a %= n
    assert split.combine(split.project(a)) == a
    assert [f.n for f in split.factors] == [p ** e for p, e in sorted(factorize(n).items())]


def test_gf_structure():
    f4 = make_ring("GF(4)")
    assert f4.size == 4 and f4.is_field and f4.characteristic == 2
    g = f4.constants()["g"]
    assert f4.add(f4.mul(g, g), f4.add(g, f4.one())) == f4.zero()
    for p, k in [(2, 2), (2, 3), (3, 2), (5, 2), (2, 4)]:
        assert is_irreducible(default_modulus(p, k), p)
    assert len(make_ring("GF(9)").units()) == 8


def test_local_rings_and_radicals():
    z4, z6 = make_ring("Z/4"), make_ring("Z/6")
    assert z4.is_local and not z6.is_local
    assert [a for a in z4.elements() if radical_membership(z4, a)] == [0, 2]
    assert radical_membership(make_ring("GF(3)"), 0)
    with pytest.raises(NotLocal):
        radical_membership(z6, 3)


def test_spec_parsing_and_errors():
    assert parse_ring_spec("GF(8)").k == 3
    assert parse_ring_spec(" Z / 12 ").n == 12
    assert make_ring("Z/4") is make_ring("Z/4")
    for bad in ["GF(6)", "Z/1"]:
        with pytest.raises(BadModulus):
            make_ring(bad)
    with pytest.raises(ParseError):
        make_ring("F(7)")
    with pytest.raises(InfiniteRing):
        enumerate_ring(make_ring("Z"))


def test_polynomial_ring_arithmetic():
    r = make_ring("ZPoly[t,u]")
    t, u = r.parse("t"), r.parse("u")
    assert r.mul(r.add(t, u), r.add(t, u)) == r.parse("t^2 + 2*t*u + u^2")
    assert not r.is_finite
