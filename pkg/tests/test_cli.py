import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from chevdioph.chevalley import import_table
from chevdioph.cli import main, run_command
from chevdioph.reduce import GroupSystem, RingSystem, parse_system
from chevdioph.tables import clear_memory

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def cli(*args, env=None):
    result = CliRunner().invoke(main, list(args), env=env)
    return result.exit_code, result.stdout, result.stderr


@pytest.fixture
def unsat_f3(tmp_path):
    path = tmp_path / "unsat_f3.ring"
    path.write_text("ring GF(3);\nvar x;\neq x^2 = 2;\n")
    return path


def test_roots_g2():
    code, out, _ = cli("roots", "G2")
    assert code == 0
    assert out.strip().splitlines()[-1] == "12 roots, 6 positive"


def test_weyl():
    code, out, _ = cli("weyl", "B3")
    assert code == 0 and "order 48, longest element length 9" in out


def test_dcent_verdicts():
    code, out, _ = cli("dcent", "--system", "C2", "--rep", "sp", "--ring", "GF(3)", "--root", "e1+e2")
    assert code == 0 and "verdict equal, |C| = 54" in out
    code, out, _ = cli("dcent", "--system", "C2", "--rep", "sp", "--ring", "GF(2)", "--root", "e1+e2")
    assert code == 1 and "verdict unequal" in out


def test_solve_unsat(unsat_f3):
    code, out, _ = cli("solve", "--in", str(unsat_f3))
    assert code == 0 and out.strip() == "UNSAT"
    assert run_command(["solve", "--in", str(unsat_f3)]) == 0


def test_solve_count_group():
    code, out, _ = cli("solve", "--count", "--in", str(CORPUS / "sl3_f2_centralizer.group"))
    assert code == 0
    assert out.splitlines()[0] == "SAT" and out.strip().endswith("count 8")


def test_usage_errors_print_grammar(tmp_path):
    bad = tmp_path / "bad.ring"
    bad.write_text("ring GF(3);\nvar x;\neq x^2 = ;\n")
    code, _, err = cli("solve", "--in", str(bad))
    assert code == 2 and "Equation files:" in err
    code, _, err = cli("solve", "--in", str(tmp_path / "undeclared.ring"))
    assert code == 2
    assert run_command(["no-such-command"]) == 2


def test_budget_exit_code():
    code, _, err = cli("--budget-elems", "100", "dcent", "--system", "A2", "--rep", "sl", "--ring", "GF(3)",
                       "--root", "a1")
    assert code == 3 and "budget exceeded" in err
    gs = CORPUS / "sl3_f2_involutions.group"
    assert cli("--budget-assign", "10", "solve", "--in", str(gs))[0] == 3


def test_env_var_overrides():
    code, out, _ = cli("roots", "A2", env={"CHEVDIOPH_FORMAT": "jsonl"})
    records = [json.loads(line) for line in out.splitlines()]
    assert records[-1] == {"positive": 3, "total": 6}


def test_jsonl_records_round_trip_through_the_parser():
    code, out, _ = cli("--format", "jsonl", "edefine", "--system", "C2", "--rep", "sp", "--ring", "GF(3)",
                       "--target", "Xa1", "--emit", "check")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    formula = records[0]
    assert formula["kind"] == "formula"
    system = parse_system(formula["text"])
    assert isinstance(system, GroupSystem) and system.to_text() == formula["text"]
    assert records[-1]["equal"] is True
    code, out, _ = cli("--format", "jsonl", "solve", "--in", str(CORPUS / "f3_unit_square.ring"))
    records = [json.loads(line) for line in out.splitlines()]
    ring_sys = parse_system((CORPUS / "f3_unit_square.ring").read_text())
    values = {r["var"]: ring_sys.ring.parse(r["value"]) for r in records if "var" in r}
    assert ring_sys.is_solution(values)


def test_seedless_and_warm_cache_identical(tmp_path):
    args = ["dcent", "--system", "A2", "--rep", "sl", "--ring", "GF(3)", "--root", "a2"]
    clear_memory()
    cold = cli("--seedless", *args)
    clear_memory()
    first = cli("--cache-dir", str(tmp_path), *args)
    clear_memory()
    warm = cli("--cache-dir", str(tmp_path), *args)
    assert cold == first == warm
    assert list(tmp_path.glob("chevtab-*.npz"))


def test_reduce_both_directions(tmp_path):
    out = tmp_path / "out.group"
    code, _, _ = cli("reduce", "r2g", "--in", str(CORPUS / "f2_y_regime.ring"), "--out", str(out),
                     "--system", "C2", "--rep", "sp")
    assert code == 0
    text = out.read_text()
    assert text.startswith("group C2 sp GF(2);") and "# map x -> m_x" in text
    assert cli("solve", "--in", str(out))[1].splitlines()[0] == "SAT"
    code, text, _ = cli("reduce", "g2r", "--in", str(CORPUS / "sl3_f2_square_root.group"))
    assert code == 0 and isinstance(parse_system(text), RingSystem)
    code, text, _ = cli("reduce", "g2r", "--bound", "1", "--in", str(CORPUS / "sl3_f2_centralizer.group"))
    assert "# bound L=1" in text
    assert cli("reduce", "g2r", "--in", str(CORPUS / "f2_y_regime.ring"))[0] == 2


def test_roundtrip_flags_wrong_expectations(tmp_path):
    (tmp_path / "a.ring").write_text("# expect SAT\nring GF(3);\nvar x;\neq x^2 = 1;\n")
    code, out, _ = cli("roundtrip", "--corpus", str(tmp_path))
    assert code == 0 and "a.ring: source SAT, compiled SAT, pull-back ok" in out
    (tmp_path / "b.ring").write_text("# expect SAT\nring GF(3);\nvar x;\neq x^2 = 2;\n")
    code, out, _ = cli("roundtrip", "--corpus", str(tmp_path))
    assert code == 1 and "b.ring: source UNSAT" in out and out.strip().endswith("1 failures")


def test_structure_commands():
    code, out, _ = cli("commtab", "--system", "G2")
    assert code == 0 and import_table(out).system == "G2"
    assert cli("relcheck", "--system", "C2", "--rep", "sp", "--ring", "GF(3)")[0] == 0
    code, out, _ = cli("relcheck", "--system", "A2", "--rep", "sl", "--ring", "ZPoly[t,u]")
    assert code == 0 and "R1: 6/6" in out
    code, out, _ = cli("gamma", "--system", "A2", "--rep", "sl", "--ring", "GF(2)", "--root", "a1")
    assert code == 0 and "3 roots" in out
    code, out, _ = cli("ringcheck", "--system", "C2", "--rep", "sp", "--ring", "Z/4")
    assert code == 0 and out.startswith("case 4 on Y: 16 pairs, 0 failures")
    code, out, _ = cli("audit", "--system", "A2", "--rep", "sl", "--ring", "GF(2)")
    assert code == 0 and "total 168, group order 168, unique forms yes" in out


def test_decompose():
    common = ["--system", "A2", "--rep", "sl", "--ring", "GF(3)"]
    code, out, _ = cli("decompose", "--mode", "bruhat", *common, "--element", "w(a1;1) x(a2;2)")
    assert code == 0 and "w(a1;1)" in out
    code, out, _ = cli("decompose", "--mode", "utv", *common, "--element", "x(-a1;1) x(a2;2)")
    assert code == 0 and "h(a1;1)" in out
    code, out, _ = cli("decompose", "--mode", "utv", *common, "--element", "w(a1;1)")
    assert code == 0 and out.strip() == "NotInBigCell"
