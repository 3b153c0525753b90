"""Command-line front end.

Exit status: 0 success (or an agreed verdict), 1 verdict failure, 2 usage or
input error, 3 budget exceeded.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from .chevalley import (CONVENTIONS, DEFAULT_CONVENTION, build_chevalley_basis,
                        build_representation, derive_commutator_table, export_table)
from .decomp import (NOT_IN_BIG_CELL, bruhat_decompose, build_bruhat_oracle, format_bruhat,
                     format_utv, utv_decompose)
from .dioph import (double_centralizer_report, e_define_subgroup, gamma_set, parse_carrier,
                    verify_ring_isomorphism)
from .errors import BudgetExceeded, CapExceeded, ChevDiophError, ParseError, UnknownSymbol
from .group import DEFAULT_CAP, make_context, verify_relations
from .reduce import (GroupSystem, RingSystem, compile_group_to_ring, compile_ring_to_group,
                     parse_system, solve_system, verify_equisolvability)
from .rootsys import build_root_system, format_coords, generate_weyl
from .tables import group_table

GRAMMAR_HELP = """\
Equation files:
  ring <spec>;                      e.g. ring GF(4);
  group <system> <rep> <spec>;      e.g. group C2 sp GF(3);
  var <name>[, <name> ...];
  eq <expr> = <expr>;
Ring expressions use integers, variables, + - * ^ and ring constants (g in GF(q)).
Group expressions use variables, v^-1, x(<root>;<t>), w(<root>;<t>), h(<root>;<t>),
commutators [a, b] and products written with * or by juxtaposition.
Roots: a1, a1+a2, 2e1, e1-e2 or coordinates [1,-1,0]. '#' starts a comment.
"""

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class Config:
    convention: str = DEFAULT_CONVENTION
    budget_elems: int = DEFAULT_CAP
    budget_assign: int | None = None
    cache_dir: str | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.budget_elems <= 0 or (self.budget_assign is not None and self.budget_assign <= 0):
            raise click.UsageError("budgets must be positive")
        if self.cache_dir:
            try:
                Path(self.cache_dir).mkdir(parents=True, exist_ok=True)
                probe = Path(self.cache_dir) / ".probe"
                probe.write_text("")
                probe.unlink()
            except OSError:
                self.cache_dir = None  # not writable: caching disabled


class Output:
    """Text lines or JSON records, one per line."""

    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, text: str, **record):
        if self.fmt == "jsonl":
            click.echo(json.dumps(record, sort_keys=True))
        else:
            click.echo(text)

    def block(self, text: str, kind: str):
        if self.fmt == "jsonl":
            click.echo(json.dumps({"kind": kind, "text": text}, sort_keys=True))
        else:
            click.echo(text, nl=not text.endswith("\n"))


def _cfg(ctx: click.Context) -> Config:
    return ctx.obj["config"]


def _out(ctx: click.Context) -> Output:
    return Output(_cfg(ctx).fmt)


def _group_options(f):
    f = click.option("--ring", "ring_spec", required=True, help="Ring spec, e.g. GF(3), Z/4.")(f)
    f = click.option("--rep", default="adjoint", show_default=True, help="adjoint | sl | sp.")(f)
    f = click.option("--system", required=True, help="Root system name, e.g. A2, C2, G2.")(f)
    return f


def _context(system, rep, ring_spec):
    return make_context(system, rep, ring_spec)


class CliGroup(click.Group):
    """Maps package exceptions onto the exit-code contract."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except BudgetExceeded as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except CapExceeded as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except (ParseError, UnknownSymbol) as exc:
            click.echo(f"error: {exc}\n\n{GRAMMAR_HELP}", err=True)
            sys.exit(EXIT_USAGE)
        except ChevDiophError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_USAGE)


@click.group(cls=CliGroup, context_settings={"auto_envvar_prefix": "CHEVDIOPH",
                                             "help_option_names": ["-h", "--help"]})
@click.option("--budget-elems", type=int, default=DEFAULT_CAP, show_default=True,
              help="Largest group the solvers may enumerate.")
@click.option("--budget-assign", type=int, default=None,
              help="Largest number of candidate assignments a search may try.")
@click.option("--format", "fmt", type=click.Choice(["text", "jsonl"]), default="text", show_default=True,
              envvar="CHEVDIOPH_FORMAT")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for derived tables (content-addressed).")
@click.option("--seedless", is_flag=True, help="Ignore the cache entirely.")
@click.option("--convention", type=click.Choice(CONVENTIONS), default=DEFAULT_CONVENTION, show_default=True)
@click.pass_context
def main(ctx, budget_elems, budget_assign, fmt, cache_dir, seedless, convention):
    """Chevalley groups over finite rings and Diophantine reductions."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = Config(convention, budget_elems, budget_assign,
                               None if seedless else cache_dir, fmt)


# --------------------------------------------------------------------------
# root systems and tables


@main.command()
@click.argument("system")
@click.pass_context
def roots(ctx, system):
    """List the roots of SYSTEM in height order."""
    out = _out(ctx)
    rs = build_root_system(system)
    for r in rs.all_roots:
        sign = "+" if r.height > 0 else "-"
        length = "long" if rs.is_long(r) else "short"
        out.emit(f"{rs.name(r):<14} {format_coords(r.coords):<14} height {r.height:>3} {sign} {length}",
                 name=rs.name(r), coords=list(r.coords), height=r.height, positive=r.height > 0,
                 long=rs.is_long(r))
    out.emit(f"{len(rs.all_roots)} roots, {len(rs.positive_roots)} positive",
             total=len(rs.all_roots), positive=len(rs.positive_roots))


@main.command()
@click.argument("system")
@click.option("--cap", type=int, default=100_000, show_default=True)
@click.option("--list", "show", is_flag=True, help="Print every reduced word.")
@click.pass_context
def weyl(ctx, system, cap, show):
    """Enumerate the Weyl group of SYSTEM."""
    out = _out(ctx)
    rs = build_root_system(system)
    elems = generate_weyl(rs, cap)
    if show:
        for w in elems:
            word = " ".join(f"s{i + 1}" for i in w.reduced_word) or "1"
            out.emit(word, word=[i + 1 for i in w.reduced_word], length=w.length)
    longest = max(w.length for w in elems)
    out.emit(f"order {len(elems)}, longest element length {longest}", order=len(elems), longest=longest)


@main.command()
@click.option("--system", required=True)
@click.option("--rep", default="adjoint", show_default=True)
@click.pass_context
def commtab(ctx, system, rep):
    """Structure constants and commutator coefficients as a chevtab table."""
    cfg = _cfg(ctx)
    rs = build_root_system(system)
    basis = build_chevalley_basis(rs, cfg.convention)
    table = derive_commutator_table(build_representation(rs, rep, cfg.convention))
    _out(ctx).block(export_table(basis, table), "commtab")


@main.command()
@_group_options
@click.pass_context
def relcheck(ctx, system, rep, ring_spec):
    """Check the Steinberg relations (symbolically over ZPoly[t,u], else exhaustively)."""
    out = _out(ctx)
    gctx = _context(system, rep, ring_spec)
    report = verify_relations(gctx)
    for rel, (tot, good) in sorted(report.counts().items()):
        out.emit(f"{rel}: {good}/{tot}", relation=rel, passed=good, total=tot)
    for rel, inst, _ in report.failures[:20]:
        out.emit(f"FAIL {rel} {inst}", relation=rel, instance=inst, failed=True)
    ctx.exit(EXIT_OK if report.ok else EXIT_VERDICT)


# --------------------------------------------------------------------------
# decompositions


@main.command()
@click.option("--mode", type=click.Choice(["bruhat", "utv"]), required=True)
@_group_options
@click.option("--element", required=True, help="Word in generator literals.")
@click.pass_context
def decompose(ctx, mode, system, rep, ring_spec, element):
    """Print the Bruhat or Gauss (UTV) form of an element as a generator word."""
    out = _out(ctx)
    gctx = _context(system, rep, ring_spec)
    g = gctx.parse_element(element)
    if mode == "bruhat":
        text = format_bruhat(gctx, bruhat_decompose(gctx, g))
    else:
        form = utv_decompose(gctx, g)
        if form is NOT_IN_BIG_CELL:
            out.emit("NotInBigCell", form=None)
            return
        text = format_utv(gctx, form)
    check = gctx.parse_element(text) == g
    out.emit(text, form=text, recomposes=check)
    if not check:
        ctx.exit(EXIT_VERDICT)


@main.command()
@_group_options
@click.pass_context
def audit(ctx, system, rep, ring_spec):
    """Bruhat census: cells with element counts and a uniqueness check."""
    out = _out(ctx)
    cfg = _cfg(ctx)
    gctx = _context(system, rep, ring_spec)
    oracle = build_bruhat_oracle(gctx)
    census = oracle.census()
    rs = gctx.rs
    for word in sorted(census, key=lambda w: (len(w), w)):
        name = " ".join(f"s{i + 1}" for i in word) or "1"
        out.emit(f"{name:<24} {census[word]}", cell=[i + 1 for i in word], count=census[word])
    total = sum(census.values())
    mult = oracle.multiplicities()
    order = group_table(gctx, cfg.budget_elems, cfg.cache_dir).size
    unique = set(mult) == {1} and len(oracle.forms) == order
    out.emit(f"total {total}, group order {order}, unique forms {'yes' if unique else 'no'}",
             total=total, order=order, unique=unique, system=str(rs.id))
    ctx.exit(EXIT_OK if unique and total == order else EXIT_VERDICT)


# --------------------------------------------------------------------------
# centralizers and definability


@main.command()
@_group_options
@click.option("--root", "root_text", required=True)
@click.pass_context
def gamma(ctx, system, rep, ring_spec, root_text):
    """Roots b with x_b(1) commuting with x_root(1)."""
    out = _out(ctx)
    gctx = _context(system, rep, ring_spec)
    gam = gamma_set(gctx, root_text)
    names = [gctx.rs.name(b) for b in gam.members]
    out.emit(" ".join(names), root=gctx.rs.name(gam.alpha), members=names)
    out.emit(f"{len(names)} roots", size=len(names))


@main.command()
@_group_options
@click.option("--root", "root_text", required=True)
@click.pass_context
def dcent(ctx, system, rep, ring_spec, root_text):
    """Double centralizer C(Gamma) versus its predicted normal form."""
    out = _out(ctx)
    cfg = _cfg(ctx)
    gctx = _context(system, rep, ring_spec)
    table = group_table(gctx, cfg.budget_elems, cfg.cache_dir)
    rep_ = double_centralizer_report(table, root_text)
    rs = gctx.rs
    form = " ".join("X" + rs.name(r) for r in rep_.form)
    out.emit(f"root {rs.name(rep_.alpha)}; |G| = {table.size}; |Z| = {rep_.center_size}; "
             f"|Gamma| = {len(rep_.gamma)}; predicted Z {form}",
             root=rs.name(rep_.alpha), group_order=table.size, center=rep_.center_size,
             gamma=len(rep_.gamma), form=[rs.name(r) for r in rep_.form])
    out.emit(f"verdict {rep_.verdict}, |C| = {len(rep_.computed)}, |predicted| = {len(rep_.predicted)}, "
             f"contained {'yes' if rep_.contained else 'no'}",
             verdict=rep_.verdict, computed=len(rep_.computed), predicted=len(rep_.predicted),
             contained=rep_.contained)
    ctx.exit(EXIT_OK if rep_.equal else EXIT_VERDICT)


@main.command()
@_group_options
@click.option("--target", required=True, help="Xa1+a2 style root subgroup or Y.")
@click.option("--emit", type=click.Choice(["text", "check"]), default="text", show_default=True,
              help="Print the formula, or also compare its solution set with the subgroup.")
@click.pass_context
def edefine(ctx, system, rep, ring_spec, target, emit):
    """Emit a pp-formula defining a root subgroup or Y."""
    out = _out(ctx)
    cfg = _cfg(ctx)
    gctx = _context(system, rep, ring_spec)
    formula = e_define_subgroup(gctx, target)
    out.block(formula.to_text(), "formula")
    if emit == "check":
        table = group_table(gctx, cfg.budget_elems, cfg.cache_dir)
        got = formula.solution_set(table, budget=cfg.budget_assign)
        want = {np.asarray(g.mat, dtype=np.int64).tobytes()
                for g in parse_carrier(gctx, target).elements(gctx)}
        ok = got == want
        out.emit(f"solution set {len(got)}, subgroup {len(want)}, {'equal' if ok else 'different'}",
                 solutions=len(got), subgroup=len(want), equal=ok)
        ctx.exit(EXIT_OK if ok else EXIT_VERDICT)


@main.command()
@_group_options
@click.option("--carrier", default=None, help="Xa1+a2 style carrier or Y (default: automatic).")
@click.pass_context
def ringcheck(ctx, system, rep, ring_spec, carrier):
    """Check that the interpreted operations on the carrier form a copy of the ring."""
    out = _out(ctx)
    gctx = _context(system, rep, ring_spec)
    report = verify_ring_isomorphism(gctx, carrier)
    out.emit(f"{report.interpretation}: {report.pairs} pairs, {len(report.failures)} failures",
             interpretation=report.interpretation, pairs=report.pairs, failures=len(report.failures))
    for f in report.failures[:20]:
        out.emit("FAIL " + " ".join(str(x) for x in f), failure=[str(x) for x in f])
    ctx.exit(EXIT_OK if report.ok else EXIT_VERDICT)


# --------------------------------------------------------------------------
# reductions and solving


def _read(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path in (None, "-"):
        click.echo(text, nl=False)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise click.UsageError(f"cannot write {path}: {exc.strerror}") from None


def _target_context(ring_system: RingSystem, system: str, rep: str):
    return make_context(system, rep, ring_system.ring.name)


@main.command()
@click.argument("direction", type=click.Choice(["r2g", "g2r"]))
@click.option("--in", "src", default="-", help="Input file ('-' for stdin).")
@click.option("--out", "dst", default="-", help="Output file ('-' for stdout).")
@click.option("--system", default="A2", show_default=True, help="Target root system (r2g).")
@click.option("--rep", default="sl", show_default=True, help="Target representation (r2g).")
@click.option("--carrier", default=None, help="Carrier for r2g (default: automatic).")
@click.option("--bound", type=int, default=None, help="g2r: bounded elementary encoding with L sweeps.")
@click.pass_context
def reduce(ctx, direction, src, dst, system, rep, carrier, bound):
    """Compile a ring system to a group system (r2g) or back (g2r)."""
    parsed = parse_system(_read(src))
    if direction == "r2g":
        if not isinstance(parsed, RingSystem):
            raise click.UsageError("r2g needs a ring system")
        result = compile_ring_to_group(parsed, _target_context(parsed, system, rep), carrier)
    else:
        if not isinstance(parsed, GroupSystem):
            raise click.UsageError("g2r needs a group system")
        result = compile_group_to_ring(parsed, bound)
    _write(dst, result.to_text())


def _format_value(system, v) -> str:
    if isinstance(system, RingSystem):
        return system.ring.format(v)
    return system.ctx.format_rows(v)


@main.command()
@click.option("--in", "src", default="-", help="Input file ('-' for stdin).")
@click.option("--count", is_flag=True, help="Count all solutions.")
@click.pass_context
def solve(ctx, src, count):
    """Exhaustively solve a ring or group system."""
    out = _out(ctx)
    cfg = _cfg(ctx)
    system = parse_system(_read(src))
    sol = solve_system(system, budget=cfg.budget_assign, count=count, cap=cfg.budget_elems,
                       cache_dir=cfg.cache_dir)
    out.emit(sol.status, status=sol.status)
    if sol.witness is not None:
        for v in system.variables:
            text = _format_value(system, sol.witness[v])
            out.emit(f"{v} = {text}", var=v, value=text)
    if count:
        out.emit(f"count {sol.count}", count=sol.count)


def _corpus_files(directory: Path) -> list:
    return sorted(p for p in directory.iterdir() if p.suffix in (".ring", ".group") and p.is_file())


def _directive(system, key: str):
    for c in system.comments:
        parts = c.split()
        if parts and parts[0] == key:
            return parts[1:]
    return None


@main.command()
@click.option("--corpus", "corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_context
def roundtrip(ctx, corpus):
    """Parse/print identity, compilation and equisolvability over a corpus directory.

    Each file may carry '# expect SAT|UNSAT' and, for ring systems,
    '# target <system> <rep>' comments.
    """
    out = _out(ctx)
    cfg = _cfg(ctx)
    failures = 0
    for path in _corpus_files(Path(corpus)):
        text = path.read_text()
        system = parse_system(text)
        printed = system.to_text()
        stable = parse_system(printed).to_text() == printed
        if isinstance(system, RingSystem):
            target = _directive(system, "target") or ["A2", "sl"]
            result = compile_ring_to_group(system, make_context(target[0], target[1], system.ring.name))
        else:
            result = compile_group_to_ring(system)
        compiled = result.to_text()
        again = compiled == (compile_ring_to_group(system, result.target.ctx).to_text()
                             if isinstance(system, RingSystem) else compile_group_to_ring(system).to_text())
        report = verify_equisolvability([result], budget=cfg.budget_assign, cap=cfg.budget_elems,
                                        cache_dir=cfg.cache_dir, labels=[path.name])
        v = report.verdicts[0]
        expect = _directive(system, "expect")
        expected_ok = expect is None or expect[0] == v.source_status
        ok = stable and again and v.agree and expected_ok
        failures += not ok
        out.emit(f"{path.name}: source {v.source_status}, compiled {v.target_status}, "
                 f"pull-back {'n/a' if v.pulled_back is None else ('ok' if v.pulled_back else 'FAILED')}, "
                 f"print {'stable' if stable else 'UNSTABLE'}, "
                 f"{'PASS' if ok else 'FAIL'}",
                 file=path.name, source=v.source_status, target=v.target_status,
                 pulled_back=v.pulled_back, stable=stable, deterministic=again,
                 expected=None if expect is None else expect[0], ok=ok)
    out.emit(f"{failures} failures", failures=failures)
    ctx.exit(EXIT_OK if failures == 0 else EXIT_VERDICT)


def run_command(argv) -> int:
    """Run the CLI in-process and return its exit status."""
    try:
        main.main(args=list(argv), prog_name="chevdioph", standalone_mode=True)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else (0 if code is None else EXIT_USAGE)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(run_command(sys.argv[1:]))
