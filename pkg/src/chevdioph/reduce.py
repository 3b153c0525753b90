"""Equation systems over rings and groups, and compilers between them.

Text format (one statement per ``;``, ``#`` starts a comment)::

    ring Z/3;
    var x;
    eq x^2 - 2 = 0;

    group C2 sp GF(3);
    var v;
    eq [v, x(a1;1)] = 1;

Ring systems compile to group systems through straight-line circuits whose
gates become products (addition) and pp-encoded interpreted multiplications.
Group systems compile to ring systems by writing each group variable as a
matrix of ring variables constrained by the defining equations of the group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dioph import (PPBuilder, carrier_membership, context_header, default_carrier,
                    interpreted_ring_ops, parse_carrier, ring_value_poly)
from .errors import BudgetExceeded, ChevDiophError, InfiniteRing, ParseError, UnknownSymbol
from .grammar import (LITERAL_KINDS, Comm, Lit, Mul, One, Pow, Var, format_group_expr,
                      parse_group_expr)
from .group import DEFAULT_CAP, GroupContext, GroupElement, make_context
from .polys import Poly
from .rings import Ring, make_ring
from .search import Constraint, run_search
from .syntax import Scanner, Token, parse_ring_expr
from .tables import group_table
from .words import check_assignment, solve_word_equations, witness_elements

# --------------------------------------------------------------------------
# systems and their text form


def _comment_lines(comments) -> list:
    return [f"# {c}" if c else "#" for c in comments]


@dataclass
class RingSystem:
    """Polynomials over the integers in ``variables`` and ring constants, each equated to 0."""

    ring: Ring
    variables: tuple
    polys: tuple
    comments: tuple = ()
    trailer: tuple = ()  # comments after the last statement

    @property
    def ring_spec(self) -> str:
        return self.ring.name

    def to_text(self) -> str:
        lines = _comment_lines(self.comments)
        lines.append(f"ring {self.ring.name};")
        if self.variables:
            lines.append(f"var {', '.join(self.variables)};")
        lines += [f"eq {p} = 0;" for p in self.polys]
        lines += _comment_lines(self.trailer)
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.to_text()

    def residuals(self, values: dict) -> list:
        env = dict(self.ring.constants())
        env.update(values)
        return [self.ring.eval_poly(p, env) for p in self.polys]

    def is_solution(self, values: dict) -> bool:
        zero = self.ring.zero()
        return all(self.ring.eq(r, zero) for r in self.residuals(values))


@dataclass
class GroupSystem:
    """Word equations ``lhs = rhs`` over a Chevalley group."""

    ctx: GroupContext
    variables: tuple
    equations: tuple
    comments: tuple = ()
    trailer: tuple = ()

    def to_text(self) -> str:
        lines = _comment_lines(self.comments)
        lines.append(f"group {context_header(self.ctx)};")
        if self.variables:
            lines.append(f"var {', '.join(self.variables)};")
        lines += [f"eq {format_group_expr(l)} = {format_group_expr(r)};" for l, r in self.equations]
        lines += _comment_lines(self.trailer)
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.to_text()

    def is_solution(self, values: dict) -> bool:
        return check_assignment(self.ctx, self.equations, values)


RESERVED_GROUP_NAMES = frozenset(LITERAL_KINDS)


class _Statements:
    """Statement-level reader shared by both system formats."""

    def __init__(self, text: str):
        self.sc = Scanner(text)
        lines = [line.strip() for line in text.splitlines()]
        code = [i for i, line in enumerate(lines) if line and not line.startswith("#")]
        last = code[-1] if code else len(lines)
        comment = [(i, line[1:].strip()) for i, line in enumerate(lines) if line.startswith("#")]
        self.comments = tuple(c for i, c in comment if i < last)
        self.trailer = tuple(c for i, c in comment if i > last)

    def header(self, keyword: str) -> Token:
        tok = self.sc.peek()
        if tok.kind != "ident" or tok.text != keyword:
            raise self.sc.error(f"expected {keyword!r} header, found {tok.text or 'end of input'!r}", tok)
        return self.sc.next()

    def raw_until_semicolon(self) -> tuple[str, Token]:
        text, tok = self.sc.read_raw_until(";")
        self.sc.pos += 1
        return text, tok

    def end_statement(self):
        if self.sc.accept(";"):
            return
        tok = self.sc.peek()
        if tok.kind != "eof":
            raise self.sc.error(f"expected ';', found {tok.text!r}", tok)

    def names(self) -> list:
        out = []
        while True:
            tok = self.sc.next()
            if tok.kind != "ident":
                raise self.sc.error(f"expected a variable name, found {tok.text or 'end of input'!r}", tok)
            out.append(tok)
            if not self.sc.accept(","):
                return out

    def body(self, on_var, on_eq):
        while True:
            tok = self.sc.peek()
            if tok.kind == "eof":
                return
            if tok.kind == "ident" and tok.text == "var":
                self.sc.next()
                on_var(self.names())
            elif tok.kind == "ident" and tok.text == "eq":
                self.sc.next()
                on_eq()
            else:
                raise self.sc.error(f"expected 'var' or 'eq', found {tok.text!r}", tok)
            self.end_statement()


def _declare(declared: list, tok: Token, forbidden, what: str):
    if tok.text in declared:
        raise ParseError(f"variable {tok.text!r} declared twice", tok.line, tok.col)
    if tok.text in forbidden:
        raise ParseError(f"{tok.text!r} cannot be used as {what}", tok.line, tok.col)
    declared.append(tok.text)


def parse_ring_system(text: str) -> RingSystem:
    st = _Statements(text)
    st.header("ring")
    spec, spec_tok = st.raw_until_semicolon()
    try:
        ring = make_ring(spec)
    except ParseError as exc:
        raise ParseError(f"bad ring {spec!r}", spec_tok.line, spec_tok.col) from exc
    consts = ring.constants()
    declared: list = []
    polys: list = []

    def resolve(tok: Token) -> Poly:
        if tok.text in declared or tok.text in consts:
            return Poly.var(tok.text)
        raise UnknownSymbol(f"unknown symbol {tok.text!r} (line {tok.line}, col {tok.col})")

    def on_var(toks):
        for t in toks:
            _declare(declared, t, consts, "a ring variable")

    def on_eq():
        lhs = parse_ring_expr(st.sc, resolve)
        st.sc.expect("=")
        rhs = parse_ring_expr(st.sc, resolve)
        polys.append(lhs - rhs)

    st.body(on_var, on_eq)
    return RingSystem(ring, tuple(declared), tuple(polys), st.comments, st.trailer)


def parse_group_system(text: str) -> GroupSystem:
    st = _Statements(text)
    st.header("group")
    sys_tok = st.sc.next()
    rep_tok = st.sc.next()
    if sys_tok.kind != "ident" or rep_tok.kind != "ident":
        raise st.sc.error("expected '<system> <rep> <ring>' after 'group'", sys_tok)
    spec, spec_tok = st.raw_until_semicolon()
    try:
        ctx = make_context(sys_tok.text, rep_tok.text, spec)
    except ParseError as exc:
        raise ParseError(f"bad ring {spec!r}", spec_tok.line, spec_tok.col) from exc
    consts = ctx.ring.constants()
    declared: list = []
    equations: list = []

    def resolve(tok: Token) -> Poly:
        if tok.text in consts:
            return Poly.var(tok.text)
        raise UnknownSymbol(f"unknown symbol {tok.text!r} (line {tok.line}, col {tok.col})")

    def on_var(toks):
        for t in toks:
            _declare(declared, t, RESERVED_GROUP_NAMES | set(consts), "a group variable")

    def side():
        tok = st.sc.peek()
        node = parse_group_expr(st.sc, lambda n: n in declared, resolve)
        try:
            return canonical_roots(ctx, node)
        except ChevDiophError as exc:
            raise ParseError(str(exc), tok.line, tok.col) from exc

    def on_eq():
        lhs = side()
        st.sc.expect("=")
        equations.append((lhs, side()))

    st.body(on_var, on_eq)
    return GroupSystem(ctx, tuple(declared), tuple(equations), st.comments, st.trailer)


def parse_system(text: str):
    """Dispatch on the header keyword."""
    sc = Scanner(text)
    tok = sc.peek()
    if tok.kind == "ident" and tok.text == "group":
        return parse_group_system(text)
    return parse_ring_system(text)


def canonical_roots(ctx: GroupContext, node):
    """Rewrite literal roots to their canonical simple-root names."""
    if isinstance(node, Lit):
        return Lit(node.kind, ctx.rs.name(ctx.rs.parse_root(node.root)), node.param)
    if isinstance(node, Pow):
        return Pow(canonical_roots(ctx, node.base), node.exp)
    if isinstance(node, Comm):
        return Comm(canonical_roots(ctx, node.left), canonical_roots(ctx, node.right))
    if isinstance(node, Mul):
        return Mul(tuple(canonical_roots(ctx, f) for f in node.factors))
    return node


# --------------------------------------------------------------------------
# straight-line circuits


@dataclass(frozen=True)
class Gate:
    kind: str  # "add", "mul" or "const"
    operands: tuple  # refs ("in", name) / ("gate", k) / ("const", Poly); const gates hold (Poly,)


@dataclass
class Circuit:
    inputs: tuple
    gates: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def __len__(self):
        return len(self.gates)

    def counts(self) -> dict:
        out = {"add": 0, "mul": 0, "const": 0}
        for g in self.gates:
            out[g.kind] += 1
        return out

    def evaluate(self, values: dict, add, mul, const) -> list:
        """Outputs under the given operations; ``const`` maps a constant Poly to a value."""
        vals: list = []

        def get(ref):
            if ref[0] == "in":
                return values[ref[1]]
            if ref[0] == "gate":
                return vals[ref[1]]
            return const(ref[1])

        for g in self.gates:
            if g.kind == "const":
                vals.append(const(g.operands[0]))
            elif g.kind == "add":
                vals.append(add(get(g.operands[0]), get(g.operands[1])))
            else:
                vals.append(mul(get(g.operands[0]), get(g.operands[1])))
        return [get(r) for r in self.outputs]

    def to_polys(self) -> list:
        return self.evaluate({v: Poly.var(v) for v in self.inputs},
                             lambda a, b: a + b, lambda a, b: a * b, lambda c: c)


def _split_by(p: Poly, x: str) -> dict:
    parts: dict = {}
    for m, c in p.terms.items():
        e = dict(m).get(x, 0)
        rest = tuple((v, k) for v, k in m if v != x)
        parts.setdefault(e, {})[rest] = c
    return {e: Poly(t) for e, t in parts.items()}


def _horner(circ: Circuit, p: Poly, inputs) -> tuple:
    live = [v for v in inputs if v in p.variables()]
    if not live:
        return ("const", p)
    x = live[0]
    parts = _split_by(p, x)
    d = max(parts)
    acc = _horner(circ, parts[d], inputs)
    for k in range(d - 1, -1, -1):
        if acc == ("const", Poly.const(1)):
            acc = ("in", x)
        else:
            circ.gates.append(Gate("mul", (acc, ("in", x))))
            acc = ("gate", len(circ.gates) - 1)
        q = parts.get(k)
        if q is not None and not q.is_zero():
            circ.gates.append(Gate("add", (acc, _horner(circ, q, inputs))))
            acc = ("gate", len(circ.gates) - 1)
    return acc


def _output_gate(circ: Circuit, ref) -> tuple:
    if ref[0] == "const":
        circ.gates.append(Gate("const", (ref[1],)))
        return ("gate", len(circ.gates) - 1)
    return ref


def system_to_circuit(polys, inputs) -> Circuit:
    """Horner circuits for each polynomial in order, over the listed inputs.

    Any variable not listed in ``inputs`` is treated as a constant symbol.
    """
    circ = Circuit(tuple(inputs))
    for p in polys:
        circ.outputs.append(_output_gate(circ, _horner(circ, Poly.coerce(p), circ.inputs)))
    return circ


def polynomial_to_circuit(p: Poly, inputs=None) -> Circuit:
    p = Poly.coerce(p)
    return system_to_circuit([p], sorted(p.variables()) if inputs is None else inputs)


# --------------------------------------------------------------------------
# compilation results


@dataclass
class ReductionOutput:
    direction: str  # "r2g" or "g2r"
    source: object
    target: object
    provenance: dict  # source variable -> tuple of target variables
    constants: tuple  # group literals or ring values the compiled system uses
    interpretation: object = None
    circuit: Circuit | None = None
    bound: int | None = None
    encodings: dict = field(default_factory=dict)

    def footer(self) -> list:
        lines = [f"map {v} -> {', '.join(t)}" for v, t in self.provenance.items()]
        if self.bound is not None:
            lines.append(f"bound L={self.bound}")
        return lines

    def to_text(self) -> str:
        return self.target.to_text() + "".join(f"# {line}\n" for line in self.footer())

    def pull_back(self, witness: dict) -> dict | None:
        """Source assignment from a target witness, or None when it falls outside."""
        if self.direction == "r2g":
            out = {}
            for v, (name,) in self.provenance.items():
                a = self.interpretation.phi_inv(witness[name])
                if a is None:
                    return None
                out[v] = a
            return out
        ctx = self.source.ctx
        out = {}
        for v, names in self.provenance.items():
            if v in self.encodings:
                mat = self.encodings[v].evaluate(ctx, {n: witness[n] for n in names})
            else:
                n = ctx.dim
                rows = [[witness[names[i * n + j]] for j in range(n)] for i in range(n)]
                mat = ctx.from_rows(rows)
            out[v] = mat
        return out

    def size(self) -> dict:
        t = self.target
        eqs = t.polys if isinstance(t, RingSystem) else t.equations
        return {"variables": len(t.variables), "equations": len(eqs)}


# --------------------------------------------------------------------------
# ring -> group


def _main_name(v: str) -> str:
    return f"m_{v}"


def compile_ring_to_group(rs: RingSystem, ctx: GroupContext, carrier=None) -> ReductionOutput:
    """Group system over ``ctx`` solvable exactly when ``rs`` is solvable in the ring."""
    if ctx.ring.name != rs.ring.name:
        raise ChevDiophError(f"ring mismatch: {rs.ring.name} vs {ctx.ring.name}")
    carrier = default_carrier(ctx) if carrier is None else parse_carrier(ctx, carrier)
    interp = interpreted_ring_ops(ctx, carrier)
    ring = ctx.ring
    consts = ring.constants()
    circ = system_to_circuit(rs.polys, rs.variables)

    mains = [_main_name(v) for v in rs.variables]
    gate_names = [f"n{k + 1}" for k in range(len(circ.gates))]
    b = PPBuilder(ctx, prefix="y", taken=set(mains) | set(gate_names))
    order: list = list(mains)

    for v in mains:
        carrier_membership(b, v, carrier)

    def const_node(c: Poly):
        return interp.phi_node(b, ring.eval_poly(c, consts))

    def node(ref):
        if ref[0] == "in":
            return Var(_main_name(ref[1]))
        if ref[0] == "gate":
            return Var(gate_names[ref[1]])
        return const_node(ref[1])

    def name_of(ref):
        if ref[0] == "const":
            tmp = b.fresh()
            b.eq(Var(tmp), const_node(ref[1]))
            return tmp
        return node(ref).name

    for k, g in enumerate(circ.gates):
        z = gate_names[k]
        order.append(z)
        if g.kind == "const":
            b.eq(Var(z), const_node(g.operands[0]))
        elif g.kind == "add":
            b.eq(Var(z), Mul((node(g.operands[0]), node(g.operands[1]))))
        else:
            x, y = name_of(g.operands[0]), name_of(g.operands[1])
            if interp.case != 1:
                carrier_membership(b, z, carrier)
            interp.encode_otimes(b, x, y, z)
    for ref in circ.outputs:
        b.eq(node(ref), One())

    variables = tuple(order) + tuple(b.exists)
    lits: list = []
    for lhs, rhs in b.equations:
        for side in (lhs, rhs):
            _collect_lits(side, lits)
    target = GroupSystem(ctx, variables, tuple(b.equations))
    prov = {v: (_main_name(v),) for v in rs.variables}
    return ReductionOutput("r2g", rs, target, prov, tuple(lits), interp, circ)


def _collect_lits(n, out: list):
    if isinstance(n, Lit):
        if n not in out:
            out.append(n)
    elif isinstance(n, Pow):
        _collect_lits(n.base, out)
    elif isinstance(n, Comm):
        _collect_lits(n.left, out)
        _collect_lits(n.right, out)
    elif isinstance(n, Mul):
        for f in n.factors:
            _collect_lits(f, out)


# --------------------------------------------------------------------------
# group -> ring


PolyMatrix = list  # list of rows of Poly


def _reduce_coeffs(p: Poly, modulus: int) -> Poly:
    if not modulus:
        return p
    return Poly({m: c % modulus for m, c in p.terms.items()})


def _matmul(a: PolyMatrix, b: PolyMatrix, modulus: int) -> PolyMatrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = Poly()
            for k in range(n):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + a[i][k] * b[k][j]
            row.append(_reduce_coeffs(acc, modulus))
        out.append(row)
    return out


def _const_matrix(ctx: GroupContext, g: GroupElement) -> PolyMatrix:
    return [[ring_value_poly(ctx, x) for x in row] for row in g.rows()]


def _var_matrix(names: list, n: int) -> PolyMatrix:
    return [[Poly.var(names[i * n + j]) for j in range(n)] for i in range(n)]


def _degree(p: Poly, variables) -> int:
    return max((sum(e for v, e in m if v in variables) for m in p.terms), default=0)


def _matrix_degree(m: PolyMatrix, variables) -> int:
    return max(_degree(p, variables) for row in m for p in row)


def _identity(n: int) -> PolyMatrix:
    return [[Poly.const(int(i == j)) for j in range(n)] for i in range(n)]


def _determinant(m: PolyMatrix, modulus: int) -> Poly:
    n = len(m)
    total = Poly()
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Poly.const(-1 if inversions % 2 else 1)
        for i in range(n):
            term = term * m[i][perm[i]]
        total = total + term
    return _reduce_coeffs(total, modulus)


def _adjoint_structure(ctx: GroupContext) -> np.ndarray:
    """c[k, i, j] with [b_i, b_j] = sum_k c[k, i, j] b_k in the adjoint basis."""
    rs, rep = ctx.rs, ctx.rep
    order = [("e", r) for r in reversed(rs.positive_roots)]
    order += [("h", s) for s in rs.simple_roots]
    order += [("e", rs.neg(r)) for r in rs.positive_roots]
    ads = []
    for kind, r in order:
        if kind == "e":
            ads.append(rep.e(r))
        else:
            e, f = rep.e(r), rep.e(rs.neg(r))
            ads.append(e @ f - f @ e)
    c = np.stack([a for a in ads], axis=1)  # c[k, i, j] = ad(b_i)[k, j]
    if not np.array_equal(c, -np.swapaxes(c, 1, 2)):
        raise ChevDiophError("adjoint basis does not match the adjoint matrices")
    return c


def membership_polys(ctx: GroupContext, a: PolyMatrix) -> list:
    """Defining equations of the group scheme for the matrix ``a``."""
    modulus = ctx.ring.characteristic
    kind = ctx.rep.kind
    n = ctx.dim
    if kind == "naturalSL":
        return [_determinant(a, modulus) - Poly.const(1)]
    if kind == "naturalSp":
        q = [[Poly.const(int(x)) for x in row] for row in ctx.rep.form]
        at = [[a[j][i] for j in range(n)] for i in range(n)]
        lhs = _matmul(_matmul(at, q, modulus), a, modulus)
        return [_reduce_coeffs(lhs[i][j] - q[i][j], modulus) for i in range(n) for j in range(n)]
    c = _adjoint_structure(ctx)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                left = Poly()
                for m in range(n):
                    if c[m, i, j]:
                        left = left + a[k][m] * int(c[m, i, j])
                right = Poly()
                for p in range(n):
                    if a[p][i].is_zero():
                        continue
                    for q in range(n):
                        if c[k, p, q] and not a[q][j].is_zero():
                            right = right + a[p][i] * a[q][j] * int(c[k, p, q])
                out.append(_reduce_coeffs(left - right, modulus))
    return out


@dataclass
class BoundedEncoding:
    """v = prod x_{roots[k]}(params[k]) over a fixed root sequence."""

    var: str
    bound: int
    roots: tuple
    params: tuple
    matrix: PolyMatrix
    inverse: PolyMatrix

    def evaluate(self, ctx: GroupContext, values: dict) -> GroupElement:
        return ctx.product(ctx.x(r, values[p]) for r, p in zip(self.roots, self.params))


def _x_poly_matrix(ctx: GroupContext, root, t: Poly) -> PolyMatrix:
    n = ctx.dim
    out = [[Poly() for _ in range(n)] for _ in range(n)]
    power = Poly.const(1)
    for d in ctx.rep.powers(root):
        for i, j in zip(*np.nonzero(d)):
            out[i][j] = out[i][j] + power * int(d[i, j])
        power = power * t
    return out


def encode_bounded_elementary(v: str, bound: int, ctx: GroupContext) -> BoundedEncoding:
    """Write v as a product of ``bound`` sweeps over all roots (positives, then negatives)."""
    if bound < 1:
        raise ChevDiophError("the bound must be at least 1")
    modulus = ctx.ring.characteristic
    seq = tuple(ctx.rs.all_roots) * bound
    params = tuple(f"{v}_p{k + 1}" for k in range(len(seq)))
    n = ctx.dim
    mat, inv = _identity(n), _identity(n)
    for r, p in zip(seq, params):
        mat = _matmul(mat, _x_poly_matrix(ctx, r, Poly.var(p)), modulus)
        inv = _matmul(_x_poly_matrix(ctx, r, -Poly.var(p)), inv, modulus)
    return BoundedEncoding(v, bound, seq, params, mat, inv)


def bounded_image_size(ctx: GroupContext, bound: int) -> int:
    """Number of distinct group elements reached by a bounded encoding."""
    ring = ctx.ring
    if not ring.is_finite:
        raise InfiniteRing(f"{ring.name} is infinite")
    current = ctx.identity().mat.astype(np.int64)[None]
    for r in tuple(ctx.rs.all_roots) * bound:
        factors = np.stack([ctx.x(r, t).mat.astype(np.int64) for t in ring.elements()])
        prods = ring.vmatmul(current[:, None], factors[None]).reshape(-1, ctx.dim, ctx.dim)
        current = np.unique(prods, axis=0)
    return len(current)


def _atoms(node, sign: int = 1) -> list:
    """Flatten a word into ("var", name, +-1) and ("lit", Lit, +-1) atoms."""
    if isinstance(node, One):
        return []
    if isinstance(node, Var):
        return [("var", node.name, sign)]
    if isinstance(node, Lit):
        return [("lit", node, sign)]
    if isinstance(node, Pow):
        return _atoms(node.base, sign if node.exp >= 0 else -sign) * abs(node.exp)
    if isinstance(node, Comm):
        seq = [node.left, node.right, Pow(node.left, -1), Pow(node.right, -1)]
        out = []
        for part in (seq if sign == 1 else reversed(seq)):
            out += _atoms(part, sign)
        return out
    if isinstance(node, Mul):
        out = []
        for f in (node.factors if sign == 1 else reversed(node.factors)):
            out += _atoms(f, sign)
        return out
    raise TypeError(node)


def compile_group_to_ring(gs: GroupSystem, bound: int | None = None) -> ReductionOutput:
    """Ring system equisolvable with ``gs``; with ``bound`` each variable is a bounded product."""
    ctx = gs.ctx
    ring = ctx.ring
    modulus = ring.characteristic
    n = ctx.dim
    consts = set(ring.constants())
    ring_vars: list = []
    polys: list = []
    mats: dict = {}
    prov: dict = {}
    encodings: dict = {}
    for v in gs.variables:
        if bound is None:
            direct = [f"{v}_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
            inverse = [f"{v}_inv_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
            ring_vars += direct + inverse
            a, ab = _var_matrix(direct, n), _var_matrix(inverse, n)
            polys += membership_polys(ctx, a)
            prod = _matmul(a, ab, modulus)
            polys += [_reduce_coeffs(prod[i][j] - int(i == j), modulus) for i in range(n) for j in range(n)]
            mats[v] = (a, ab)
            prov[v] = tuple(direct)
        else:
            enc = encode_bounded_elementary(v, bound, ctx)
            ring_vars += enc.params
            mats[v] = (enc.matrix, enc.inverse)
            prov[v] = enc.params
            encodings[v] = enc
    used_lits: list = []
    k_tmp = 0
    variables = set(ring_vars)

    def word_matrix(node):
        nonlocal k_tmp
        acc = None
        pending = None  # constant group element waiting to be multiplied in
        for kind, payload, sign in _atoms(node):
            if kind == "lit":
                if payload not in used_lits:
                    used_lits.append(payload)
                g = ctx.evaluate(payload)
                g = g if sign == 1 else ctx.inverse(g)
                pending = g if pending is None else pending * g
                continue
            factor = mats[payload][0 if sign == 1 else 1]
            if pending is not None:
                c = _const_matrix(ctx, pending)
                acc = c if acc is None else _matmul(acc, c, modulus)
                pending = None
            if acc is not None and _matrix_degree(acc, variables) >= 2:
                k_tmp += 1
                names = [f"t{k_tmp}_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
                ring_vars.extend(names)
                variables.update(names)
                polys.extend(_reduce_coeffs(Poly.var(names[i * n + j]) - acc[i][j], modulus)
                             for i in range(n) for j in range(n))
                acc = _var_matrix(names, n)
            acc = factor if acc is None else _matmul(acc, factor, modulus)
        if pending is not None:
            c = _const_matrix(ctx, pending)
            acc = c if acc is None else _matmul(acc, c, modulus)
        return _identity(n) if acc is None else acc

    for lhs, rhs in gs.equations:
        left, right = word_matrix(lhs), word_matrix(rhs)
        polys += [_reduce_coeffs(left[i][j] - right[i][j], modulus) for i in range(n) for j in range(n)]
    clash = consts & set(ring_vars)
    if clash:
        raise ChevDiophError(f"compiled variable names clash with ring constants: {sorted(clash)}")
    target = RingSystem(ring, tuple(ring_vars), tuple(polys))
    return ReductionOutput("g2r", gs, target, prov, tuple(used_lits), bound=bound, encodings=encodings)


# --------------------------------------------------------------------------
# solvers


@dataclass
class Solution:
    status: str  # "SAT" or "UNSAT"
    witness: dict | None
    count: int | None
    explored: int

    @property
    def satisfiable(self) -> bool:
        return self.status == "SAT"


def _veval(ring, p: Poly, env: dict, n: int) -> np.ndarray:
    total = np.zeros(n, dtype=np.int64)
    for m, c in p.terms.items():
        term = np.broadcast_to(np.asarray(ring.from_int(c), dtype=np.int64), (n,))
        for v, e in m:
            x = env[v][0]
            for _ in range(e):
                term = ring.vmul(term, x)
        total = ring.vadd(total, term)
    return np.broadcast_to(total, (n,))


def _definer(ring, p: Poly, v: str):
    """(coefficient inverse, rest) when p = c*v + rest with c a unit and v absent from rest."""
    mono = ((v, 1),)
    c = p.terms.get(mono)
    if c is None:
        return None
    rest = Poly({m: k for m, k in p.terms.items() if m != mono})
    if v in rest.variables():
        return None
    cr = ring.from_int(c)
    if not ring.is_unit(cr):
        return None
    return ring.neg(ring.inv(cr)), rest


def ring_constraints(ring, polys, variables) -> list:
    consts = ring.constants()
    out = []
    for p in polys:
        vs = frozenset(v for v in p.variables() if v not in consts or v in variables)
        const_env = {k: (np.asarray([val], dtype=np.int64),) for k, val in consts.items()
                     if k in p.variables() and k not in variables}

        def check(env, n, p=p, const_env=const_env):
            full = {**const_env, **env}
            return _veval(ring, p, full, n) == 0

        definers = {}
        for v in vs:
            d = _definer(ring, p, v)
            if d is not None:
                scale, rest = d

                def define(env, n, scale=scale, rest=rest, const_env=const_env):
                    full = {**const_env, **env}
                    val = ring.vmul(np.asarray(scale, dtype=np.int64), _veval(ring, rest, full, n))
                    return (np.ascontiguousarray(np.broadcast_to(val, (n,))),)

                definers[v] = define
        out.append(Constraint(vs, check, definers, str(p)))
    return out


def _cooccurrence(polys, variables) -> tuple[dict, set]:
    """Neighbours of each variable (sharing a monomial) and variables of degree > 1."""
    vs = set(variables)
    nbrs = {v: set() for v in variables}
    nonlinear = set()
    for p in polys:
        for m in p.terms:
            inside = [(v, e) for v, e in m if v in vs]
            for v, e in inside:
                if e > 1:
                    nonlinear.add(v)
                nbrs[v].update(u for u, _ in inside if u != v)
    return nbrs, nonlinear


def affine_variables(polys, variables) -> tuple:
    """A set U such that no monomial contains two factors from U (greedy, min degree first)."""
    nbrs, nonlinear = _cooccurrence(polys, variables)
    order = {v: k for k, v in enumerate(variables)}
    live = {v for v in variables if v not in nonlinear}
    chosen = []
    while live:
        v = min(live, key=lambda u: (len(nbrs[u] & live), -order[u]))
        chosen.append(v)
        live -= nbrs[v] | {v}
    return tuple(sorted(chosen, key=order.get))


class _AffineSolver:
    """Solves, row by row, a batch of systems that are affine in the unknowns ``u``.

    Coefficients depend on already assigned variables.  Elimination pivots on
    units only; unknowns without a pivot are enumerated and every equation is
    re-checked at the end, so the result is exact over any finite ring.
    """

    def __init__(self, ring, polys, unknowns, budget_state):
        self.ring = ring
        self.unknowns = list(unknowns)
        self.polys = list(polys)
        self.budget = budget_state
        idx = {u: k for k, u in enumerate(self.unknowns)}
        self.coeffs = []  # per equation: ({k: Poly}, Poly rest)
        for p in self.polys:
            lin: dict = {}
            rest: dict = {}
            for m, c in p.terms.items():
                hit = [(v, e) for v, e in m if v in idx]
                if hit:
                    (v, _), = hit
                    other = tuple((w, e) for w, e in m if w != v)
                    lin.setdefault(idx[v], {})[other] = c
                else:
                    rest[m] = c
            self.coeffs.append(({k: Poly(t) for k, t in lin.items()}, Poly(rest)))
        elems = ring.elements()
        self.elems = np.asarray(elems, dtype=np.int64)
        size = max(elems) + 1
        self.unit = np.zeros(size, dtype=bool)
        self.inv = np.zeros(size, dtype=np.int64)
        for a in elems:
            if ring.is_unit(a):
                self.unit[a] = True
                self.inv[a] = ring.inv(a)

    def __call__(self, env, n):
        step = max(1, 2_000_000 // max(1, len(self.polys) * len(self.unknowns)))
        if n <= step:
            return self._solve(env, n)
        parts, total = [], 0
        for start in range(0, n, step):
            stop = min(n, start + step)
            out, m = self._solve({v: (val[0][start:stop],) for v, val in env.items()}, stop - start)
            parts.append(out)
            total += m
        return {v: (np.concatenate([p[v][0] for p in parts]),) for v in parts[0]}, total

    def _solve(self, env, n):
        ring = self.ring
        m, k = len(self.polys), len(self.unknowns)
        a = np.zeros((n, m, k), dtype=np.int64)
        b = np.zeros((n, m), dtype=np.int64)
        for e, (lin, rest) in enumerate(self.coeffs):
            for j, c in lin.items():
                a[:, e, j] = _veval(ring, c, env, n)
            b[:, e] = ring.vneg(_veval(ring, rest, env, n))
        used = np.zeros((n, m), dtype=bool)
        pivot = np.full((n, k), -1, dtype=np.int64)
        rows = np.arange(n)
        for j in range(k):
            cand = self.unit[a[:, :, j]] & ~used
            has = cand.any(axis=1)
            if not has.any():
                continue
            r = rows[has]
            p = np.argmax(cand[has], axis=1)
            scale = self.inv[a[r, p, j]]
            a[r, p] = ring.vmul(scale[:, None], a[r, p])
            b[r, p] = ring.vmul(scale, b[r, p])
            f = a[r, :, j].copy()
            f[np.arange(len(r)), p] = 0
            hit = np.nonzero(f.any(axis=0))[0]
            if len(hit):
                piv_a = a[r, p][:, None, :]
                piv_b = b[r, p][:, None]
                fh = f[:, hit]
                sel = np.ix_(r, hit)
                a[sel] = ring.vsub(a[sel], ring.vmul(fh[:, :, None], piv_a))
                b[sel] = ring.vsub(b[sel], ring.vmul(fh, piv_b))
            used[r, p] = True
            pivot[r, j] = p
        # group rows by their free-column pattern and enumerate the free unknowns
        out_env = {v: [] for v in env}
        out_u = [[] for _ in range(k)]
        total = 0
        patterns = {}
        for i, key in enumerate(map(bytes, (pivot < 0).astype(np.uint8))):
            patterns.setdefault(key, []).append(i)
        for key, members in patterns.items():
            members = np.asarray(members)
            free = [j for j in range(k) if key[j]]
            q = len(self.elems)
            combos = q ** len(free)
            self.budget["explored"] += len(members) * combos
            if self.budget["limit"] is not None and self.budget["explored"] > self.budget["limit"]:
                raise BudgetExceeded(f"more than {self.budget['limit']} candidate assignments")
            rep = np.repeat(members, combos)
            vals = np.zeros((len(rep), k), dtype=np.int64)
            for t, j in enumerate(free):
                block = q ** (len(free) - t - 1)
                vals[:, j] = np.tile(np.repeat(self.elems, block), len(members) * (combos // (block * q)))
            for j in range(k):
                if key[j]:
                    continue
                p = pivot[rep, j]
                acc = b[rep, p]
                for jf in free:
                    acc = ring.vsub(acc, ring.vmul(a[rep, p, jf], vals[:, jf]))
                vals[:, j] = acc
            sub = {v: (val[0][rep],) for v, val in env.items()}
            for j, u in enumerate(self.unknowns):
                sub[u] = (vals[:, j],)
            ok = np.ones(len(rep), dtype=bool)
            for poly in self.polys:
                ok &= _veval(ring, poly, sub, len(rep)) == 0
            for v in env:
                out_env[v].append(sub[v][0][ok])
            for j, u in enumerate(self.unknowns):
                out_u[j].append(vals[ok, j])
            total += int(ok.sum())
        result = {v: (np.concatenate(parts),) for v, parts in out_env.items()}
        for j, u in enumerate(self.unknowns):
            result[u] = (np.concatenate(out_u[j]),)
        return result, total


def solve_ring_system(rs: RingSystem, budget=None, count=False) -> Solution:
    """Exhaustive search; variables occurring only affinely are solved by elimination."""
    ring = rs.ring
    if not ring.is_finite:
        raise InfiniteRing(f"{ring.name} is infinite; exhaustive solving is impossible")
    consts = ring.constants()
    unknowns = affine_variables(rs.polys, rs.variables)
    ukn = set(unknowns)
    outer_polys = [p for p in rs.polys if not (p.variables() & ukn)]
    inner_polys = [p for p in rs.polys if p.variables() & ukn]
    outer_vars = [v for v in rs.variables if v not in ukn]
    constraints = ring_constraints(ring, outer_polys, outer_vars)
    elems = np.asarray(ring.elements(), dtype=np.int64)
    state = {"explored": 0, "limit": budget}
    const_env = {k: (np.asarray([val], dtype=np.int64),) for k, val in consts.items()}
    extend = None
    if unknowns:
        solver = _AffineSolver(ring, inner_polys, unknowns, state)

        def extend(env, n):
            full = {k: (np.broadcast_to(v[0], (n,)),) for k, v in const_env.items()}
            full.update(env)
            out, m = solver(full, n)
            return {v: out[v] for v in rs.variables}, m

    def domain(v, unary):
        vals = elems
        for c in unary:
            vals = vals[np.asarray(c.check({v: (vals,)}, len(vals)), dtype=bool)]
        return (vals,)

    res = run_search(outer_vars, constraints, domain, count=count, budget=budget, extend=extend)
    witness = None
    if res.satisfiable:
        witness = {v: int(res.witness[v][0][0]) for v in rs.variables}
        if not rs.is_solution(witness):
            raise ChevDiophError("solver witness failed direct evaluation")
    return Solution(res.status, witness, res.count, res.explored + state["explored"])


def solve_group_system(gs: GroupSystem, budget=None, count=False, cap: int = DEFAULT_CAP,
                       cache_dir=None) -> Solution:
    table = group_table(gs.ctx, cap=cap, cache_dir=cache_dir)
    res = solve_word_equations(table, gs.variables, list(gs.equations), count=count, budget=budget)
    witness = None
    if res.satisfiable:
        witness = witness_elements(gs.ctx, res.witness)
        if not gs.is_solution(witness):
            raise ChevDiophError("solver witness failed direct evaluation")
    return Solution(res.status, witness, res.count, res.explored)


def solve_system(system, budget=None, count=False, cap: int = DEFAULT_CAP, cache_dir=None) -> Solution:
    if isinstance(system, RingSystem):
        return solve_ring_system(system, budget=budget, count=count)
    return solve_group_system(system, budget=budget, count=count, cap=cap, cache_dir=cache_dir)


# --------------------------------------------------------------------------
# equisolvability


@dataclass
class PairVerdict:
    label: str
    source_status: str
    target_status: str
    pulled_back: bool | None  # None when the target is UNSAT

    @property
    def agree(self) -> bool:
        return self.source_status == self.target_status and self.pulled_back is not False


@dataclass
class EquisolvabilityReport:
    verdicts: list

    @property
    def ok(self) -> bool:
        return all(v.agree for v in self.verdicts)


def check_pull_back(out: ReductionOutput, witness: dict) -> bool:
    back = out.pull_back(witness)
    if back is None:
        return False
    try:
        return out.source.is_solution(back)
    except ChevDiophError:
        return False


def verify_equisolvability(outputs, budget=None, cap: int = DEFAULT_CAP, cache_dir=None,
                           labels=None) -> EquisolvabilityReport:
    verdicts = []
    for k, out in enumerate(outputs):
        src = solve_system(out.source, budget=budget, cap=cap, cache_dir=cache_dir)
        tgt = solve_system(out.target, budget=budget, cap=cap, cache_dir=cache_dir)
        pulled = check_pull_back(out, tgt.witness) if tgt.satisfiable else None
        label = labels[k] if labels else f"#{k + 1}"
        verdicts.append(PairVerdict(label, src.status, tgt.status, pulled))
    return EquisolvabilityReport(verdicts)


def compile_system(system, ctx: GroupContext | None = None, carrier=None, bound=None) -> ReductionOutput:
    if isinstance(system, RingSystem):
        if ctx is None:
            raise ChevDiophError("a ring system needs a target group context")
        return compile_ring_to_group(system, ctx, carrier)
    return compile_group_to_ring(system, bound)
