import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chevdioph.errors import BudgetExceeded, ChevDiophError, InfiniteRing, ParseError, UnknownSymbol
from chevdioph.grammar import Comm, Lit, One, Var
from chevdioph.group import make_context
from chevdioph.polys import Poly
from chevdioph.reduce import (GroupSystem, RingSystem, bounded_image_size, compile_group_to_ring,
                              compile_ring_to_group, encode_bounded_elementary, membership_polys,
                              parse_group_system, parse_ring_system, parse_system, polynomial_to_circuit,
                              solve_group_system, solve_ring_system, system_to_circuit,
                              verify_equisolvability)
from chevdioph.rings import make_ring
from chevdioph.tables import group_table
from chevdioph.words import check_assignment

SMALL_RINGS = ["GF(2)", "GF(3)", "GF(4)", "Z/4", "Z/6"]
VARS = ("x", "y", "z")


@st.composite
def polys(draw, variables=VARS, max_terms=4, max_deg=3):
    p = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {v: draw(st.integers(0, max_deg)) for v in variables}
        p = p + Poly.monomial(draw(st.integers(-5, 5)), **{k: e for k, e in exps.items() if e})
    return p


def brute_force_count(ring, variables, ps) -> int:
    consts = ring.constants()
    n = 0
    for vals in itertools.product(ring.elements(), repeat=len(variables)):
        env = dict(consts)
        env.update(zip(variables, vals))
        n += all(ring.eq(ring.eval_poly(p, env), ring.zero()) for p in ps)
    return n


# ---------------------------------------------------------------- text form


@given(st.sampled_from(SMALL_RINGS), st.lists(polys(), min_size=0, max_size=3))
def test_ring_system_print_parse_identity(ring_spec, ps):
    rs = RingSystem(make_ring(ring_spec), VARS, tuple(ps), ("expect SAT",))
    text = rs.to_text()
    again = parse_ring_system(text)
    assert again.to_text() == text
    assert again.variables == VARS
    assert [str(p) for p in again.polys] == [str(p) for p in ps]


@st.composite
def words(draw, depth=3):
    atoms = [Var("u"), Var("v"), Lit("x", "a1", Poly.const(1)), Lit("x", "a1+a2", Poly.const(2)),
             Lit("w", "a2", Poly.const(1)), Lit("h", "a1", Poly.const(2)), One()]
    if depth == 0:
        return draw(st.sampled_from(atoms))
    kind = draw(st.sampled_from(["atom", "mul", "comm", "pow"]))
    if kind == "atom":
        return draw(st.sampled_from(atoms))
    if kind == "comm":
        return Comm(draw(words(depth - 1)), draw(words(depth - 1)))
    if kind == "pow":
        from chevdioph.grammar import Pow
        base = draw(st.sampled_from(atoms[:2]))
        return Pow(base, draw(st.sampled_from([-1, 2, 3])))
    from chevdioph.grammar import Mul
    return Mul(tuple(draw(words(depth - 1)) for _ in range(draw(st.integers(2, 3)))))


@settings(max_examples=60)
@given(st.lists(st.tuples(words(), words()), min_size=1, max_size=3))
def test_group_system_print_parse_identity(eqs):
    ctx = make_context("A2", "sl", "GF(3)")
    text = GroupSystem(ctx, ("u", "v"), tuple(eqs)).to_text()
    once = parse_group_system(text)
    assert once.to_text() == parse_group_system(once.to_text()).to_text()
    # printing and reparsing never changes the meaning
    table = group_table(ctx)
    for i, j in [(0, 1), (100, 2000), (5000, 17)]:
        env = {"u": table.element(i), "v": table.element(j)}
        assert check_assignment(ctx, once.equations, env) == all(
            ctx.evaluate(l, env) == ctx.evaluate(r, env) for l, r in eqs)


def test_parse_errors():
    with pytest.raises(UnknownSymbol):
        parse_ring_system("ring GF(3); var x; eq x*y = 1;")
    with pytest.raises(ParseError):
        parse_ring_system("ring GF(3); var x, x;")
    with pytest.raises(ParseError):
        parse_ring_system("ring GF(4); var g;")
    with pytest.raises(ParseError):
        parse_group_system("group A2 sl GF(2); var w;")
    with pytest.raises(ParseError):
        parse_group_system("group A2 sl GF(2); var v; eq v = x(a3;1);")
    with pytest.raises(ParseError):
        parse_system("field GF(2);")
    with pytest.raises(ParseError):
        parse_ring_system("ring GF(3); var x eq x = 1;")
    # final semicolon is optional, comments survive
    rs = parse_system("# expect UNSAT\nring GF(3);\nvar x;\neq x^2 = 2")
    assert rs.comments == ("expect UNSAT",) and len(rs.polys) == 1
    gs = parse_system("group C2 sp GF(3); var v; eq v = x(e1+e2;1);")
    assert gs.to_text().endswith("eq v = x(a1+a2;1);\n")


def test_trailing_comments_stay_trailing():
    text = "# head\nring GF(2);\nvar x;\neq x - 1 = 0;\n# map x -> m_x\n"
    assert parse_system(text).to_text() == text


# ---------------------------------------------------------------- circuits


@given(polys())
def test_circuit_reproduces_polynomial(p):
    circ = polynomial_to_circuit(p, VARS)
    assert circ.to_polys() == [p]


@settings(max_examples=60)
@given(st.sampled_from(SMALL_RINGS), st.lists(polys(), min_size=1, max_size=3), st.data())
def test_circuit_evaluation_over_rings(ring_spec, ps, data):
    ring = make_ring(ring_spec)
    circ = system_to_circuit(ps, VARS)
    values = {v: data.draw(st.sampled_from(ring.elements())) for v in VARS}
    got = circ.evaluate(values, ring.add, ring.mul, lambda c: ring.eval_poly(c, ring.constants()))
    env = dict(ring.constants())
    env.update(values)
    assert got == [ring.eval_poly(p, env) for p in ps]


def test_horner_gate_counts():
    x = Poly.var("x")
    assert len(polynomial_to_circuit(x * x + x + 1)) == 3
    assert polynomial_to_circuit(Poly.const(5)).counts() == {"add": 0, "mul": 0, "const": 1}
    assert len(polynomial_to_circuit(x * Poly.var("y") + 2)) == 2


# ---------------------------------------------------------------- solvers


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SMALL_RINGS), st.lists(polys(max_deg=2), min_size=1, max_size=3))
def test_ring_solver_counts_match_brute_force(ring_spec, ps):
    ring = make_ring(ring_spec)
    rs = RingSystem(ring, VARS, tuple(ps))
    sol = solve_ring_system(rs, count=True)
    want = brute_force_count(ring, VARS, ps)
    assert sol.count == want
    assert sol.satisfiable == (want > 0)
    if sol.satisfiable:
        assert rs.is_solution(sol.witness)


def test_solver_examples():
    assert solve_ring_system(parse_ring_system("ring GF(3); var x; eq x^2 = 2;")).status == "UNSAT"
    empty = solve_ring_system(parse_ring_system("ring GF(3);"))
    assert empty.status == "SAT" and empty.witness == {}
    with pytest.raises(InfiniteRing):
        solve_ring_system(parse_ring_system("ring Z; var x; eq x = 1;"))
    with pytest.raises(BudgetExceeded):
        solve_ring_system(parse_ring_system("ring GF(5); var x, y, z; eq x*y*z = 2; eq x^2 = y^3 + z;"),
                          budget=10)


def test_centralizer_count_matches_direct_enumeration():
    gs = parse_group_system("group A2 sl GF(2); var v; eq [v, x(a1;1)] = 1;")
    sol = solve_group_system(gs, count=True)
    table = group_table(gs.ctx)
    direct = sum(check_assignment(gs.ctx, gs.equations, {"v": g}) for g in table)
    assert sol.count == direct == 8


def test_group_solver_witness_checks():
    gs = parse_group_system("group A2 sl GF(2); var u, v; eq u*v = x(a1;1); eq v^2 = 1;")
    sol = solve_group_system(gs)
    assert sol.satisfiable and gs.is_solution(sol.witness)


# ---------------------------------------------------------------- ring -> group


R2G_CASES = [("ring GF(3); var x; eq x^2 = 1;", ("A2", "sl"), "SAT"),
             ("ring GF(3); var x; eq x^2 = 2;", ("A2", "sl"), "UNSAT"),
             ("ring GF(2); var x, y; eq x*y = 1; eq x = 0;", ("A2", "sl"), "UNSAT"),
             ("ring GF(2); var x; eq x^2 + 1 = 0;", ("C2", "sp"), "SAT"),
             ("ring Z/4; var x; eq x^2 = 3;", ("C2", "sp"), "UNSAT")]


@pytest.mark.parametrize("text,target,status", R2G_CASES)
def test_ring_to_group_equisolvable(text, target, status):
    rs = parse_ring_system(text)
    out = compile_ring_to_group(rs, make_context(target[0], target[1], rs.ring.name))
    verdict = verify_equisolvability([out]).verdicts[0]
    assert verdict.source_status == verdict.target_status == status
    assert verdict.agree
    assert out.footer()[0].startswith("map x -> m_x")
    assert out.circuit.to_polys() == list(rs.polys)


def test_compilation_is_deterministic():
    text = "ring GF(3); var x, y; eq x*y + 2*x = 1;"
    ctx = make_context("A2", "sl", "GF(3)")
    outs = {compile_ring_to_group(parse_ring_system(text), ctx).to_text() for _ in range(3)}
    assert len(outs) == 1


def _drop_centralizer_equations(out):
    keep = tuple(e for e in out.target.equations
                 if not (isinstance(e[0], Comm) and isinstance(e[0].left, Var)
                         and isinstance(e[0].right, Lit) and isinstance(e[1], One)))
    assert len(keep) < len(out.target.equations)
    return dataclasses.replace(out, target=dataclasses.replace(out.target, equations=keep))


@pytest.mark.parametrize("text", ["ring GF(2); var x; eq x^2 + x + 1 = 0;", "ring GF(3); var x; eq x^2 = 2;",
                                  "ring GF(2); var x, y; eq x*y = 1; eq x = 0;"])
def test_corrupted_compilation_is_caught(text):
    rs = parse_ring_system(text)
    out = compile_ring_to_group(rs, make_context("A2", "sl", rs.ring.name))
    assert verify_equisolvability([out]).ok
    bad = verify_equisolvability([_drop_centralizer_equations(out)])
    assert not bad.ok
    verdict = bad.verdicts[0]
    assert verdict.source_status == "UNSAT" and verdict.target_status == "SAT"


@pytest.mark.parametrize("system,kind,ring", [("A2", "sl", "GF(3)"), ("C2", "sp", "GF(3)"),
                                              ("C2", "sp", "GF(2)"), ("G2", "adjoint", "GF(2)")])
def test_compiled_size_is_affine_in_circuit_size(system, kind, ring):
    ctx = make_context(system, kind, ring)
    sizes = []
    for k in range(1, 6):
        out = compile_ring_to_group(parse_ring_system(f"ring {ring}; var x; eq x^{k} = 1;"), ctx)
        sizes.append((len(out.circuit), out.size()["equations"], out.size()["variables"]))
    gates = [s[0] for s in sizes]
    assert gates == list(range(1, 6))
    eq_steps = {b[1] - a[1] for a, b in zip(sizes, sizes[1:])}
    var_steps = {b[2] - a[2] for a, b in zip(sizes, sizes[1:])}
    assert len(eq_steps) == 1 and len(var_steps) == 1


def test_ring_mismatch_rejected():
    with pytest.raises(ChevDiophError):
        compile_ring_to_group(parse_ring_system("ring GF(3); var x; eq x = 1;"), make_context("A2", "sl", "GF(2)"))


# ---------------------------------------------------------------- group -> ring


def test_group_to_ring_sl3_square_root():
    gs = parse_group_system("group A2 sl GF(2); var v; eq v*v = x(a1;1);")
    out = compile_group_to_ring(gs)
    assert out.size() == {"variables": 18, "equations": 19}
    assert len([p for p in out.target.polys if p.degree() == 3]) == 1
    verdict = verify_equisolvability([out]).verdicts[0]
    assert verdict.source_status == verdict.target_status == "SAT" and verdict.pulled_back


def test_group_to_ring_unsat():
    out = compile_group_to_ring(parse_group_system("group A2 sl GF(2); var v; eq v^4 = x(a1;1);"))
    verdict = verify_equisolvability([out]).verdicts[0]
    assert verdict.source_status == verdict.target_status == "UNSAT"


def test_membership_blocks():
    sp4 = make_context("C2", "sp", "GF(3)")
    a = [[Poly.var(f"a{i}{j}") for j in range(4)] for i in range(4)]
    assert len(membership_polys(sp4, a)) == 16
    sl3 = make_context("A2", "sl", "GF(2)")
    a = [[Poly.var(f"a{i}{j}") for j in range(3)] for i in range(3)]
    (det,) = membership_polys(sl3, a)
    assert len(det.terms) == 7  # six monomials and the constant


def test_bounded_encoding():
    ctx = make_context("C2", "sp", "GF(2)")
    assert len(encode_bounded_elementary("v", 1, ctx).params) == 8
    enc = encode_bounded_elementary("v", 2, ctx)
    assert len(enc.params) == 16 and enc.params[0] == "v_p1"
    assert bounded_image_size(ctx, 1) == 256
    assert bounded_image_size(ctx, 2) == 720
    with pytest.raises(ChevDiophError):
        encode_bounded_elementary("v", 0, ctx)
    gs = parse_group_system("group C2 sp GF(2); var v; eq [v, x(a1;1)] = x(2a1+a2;1);")
    out = compile_group_to_ring(gs, bound=1)
    assert "# bound L=1" in out.to_text()
    verdict = verify_equisolvability([out]).verdicts[0]
    assert verdict.agree
