import pytest
from hypothesis import given
from hypothesis import strategies as st

from chevdioph.errors import ParseError, UnknownSymbol
from chevdioph.grammar import Comm, Lit, Mul, Pow, Var, format_group_expr, parse_word_text, variables_of
from chevdioph.polys import Poly
from chevdioph.syntax import parse_poly_text

from test_reduce import polys


@given(polys(), polys(), st.dictionaries(st.sampled_from("xyz"), st.integers(-7, 7), min_size=3))
def test_poly_evaluation_is_a_homomorphism(p, q, env):
    assert (p + q).eval_int(env) == p.eval_int(env) + q.eval_int(env)
    assert (p * q).eval_int(env) == p.eval_int(env) * q.eval_int(env)
    assert (p - p).is_zero()


@given(polys())
def test_poly_text_round_trip(p):
    assert parse_poly_text(str(p), {"x", "y", "z"}) == p


def test_poly_parsing_details():
    x = Poly.var("x")
    assert parse_poly_text("(x + 1)^2", {"x"}) == x * x + 2 * x + 1
    assert parse_poly_text("-x^3 - -2", {"x"}) == -(x ** 3) + 2
    assert parse_poly_text("2*x", {"x"}) == 2 * x
    for bad in ("x +", "2 x"):  # ring products need an explicit '*'
        with pytest.raises(ParseError):
            parse_poly_text(bad, {"x"})
    with pytest.raises((ParseError, UnknownSymbol)):
        parse_poly_text("q + 1", {"x"})


def test_word_parsing():
    node = parse_word_text("[v, x(a1;1)] * w^-1 x(a1+a2; 2)", variables=["v", "w"])
    assert isinstance(node, Mul) and isinstance(node.factors[0], Comm)
    assert node.factors[1] == Pow(Var("w"), -1)
    assert node.factors[2] == Lit("x", "a1+a2", Poly.const(2))
    assert variables_of(node) == ["v", "w"]
    assert format_group_expr(node) == "[v, x(a1;1)] * w^-1 * x(a1+a2;2)"
    assert parse_word_text(format_group_expr(node), variables=["v", "w"]) == node


def test_nested_products_keep_parentheses():
    node = parse_word_text("(u v)^-1", variables=["u", "v"])
    again = parse_word_text(format_group_expr(node), variables=["u", "v"])
    assert again == node
    inner = Mul((Var("u"), Mul((Var("v"), Var("u")))))
    assert format_group_expr(inner) == "u * (v * u)"


@pytest.mark.parametrize("bad", ["x(a1;1", "[u, v", "u^", "x(a1)", "u v )"])
def test_word_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_word_text(bad, variables=["u", "v"])
