"""Problem files: a line-oriented description of one system.

Example::

    # worked example on R^2
    vars q1 q2
    lagrangian.invariant 1/2*v1^2 + 1/2*v2^2
    lagrangian.delta q1^2*v2
    algebra dim 2
    bracket e1 e2 = 0
    generator e1 = d/dq1
    generator e2 = d/dq2
    option sign_convention paper-B

In Lagrangian mode the velocities ``v1..vn`` are declared automatically and
the action is lifted to the tangent chart. In form mode (``form.omega`` and
optionally ``form.invariant``) everything lives on the declared variables.
``cochain eI eJ = EXPR`` lines supply an explicit 2-cochain for the
``jacobi`` and ``trivial`` commands.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from fractions import Fraction

from .cohomology import Cochain
from .errors import ProblemSyntaxError
from .exactalg import Chart, Poly, Variable
from .formscalc import KForm, SignConvention, VectorField
from .liealg import ActionMap, LieAlgebra, tangent_chart
from .mechanics import LagrangianSystem, PhaseSystem
from .oracle import TrialPlan
from .parser import parse_form, parse_poly, parse_vector_field

_OPTION_KEYS = ("sign_convention", "base_point", "degree_bound", "seed", "trials", "fd_step", "fd_tol", "generators")


@dataclass(frozen=True)
class Options:
    sign_convention: SignConvention | None = None
    base_point: tuple[Fraction, ...] | None = None
    degree_bound: int | None = None
    seed: int | None = None
    trials: int | None = None
    fd_step: float | None = None
    fd_tol: float | None = None
    generators: str | None = None

    def merged(self, **overrides) -> Options:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def plan(self) -> TrialPlan:
        base = TrialPlan()
        return TrialPlan(
            seed=self.seed if self.seed is not None else base.seed,
            trials=self.trials if self.trials is not None else base.trials,
            fd_step=self.fd_step if self.fd_step is not None else base.fd_step,
            fd_tol=self.fd_tol if self.fd_tol is not None else base.fd_tol,
        )

    @property
    def convention(self) -> SignConvention:
        return self.sign_convention or SignConvention.A

    def render(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, SignConvention):
                v = v.value
            elif isinstance(v, tuple):
                v = " ".join(str(x) for x in v)
            out.append(f"option {f.name} {v}")
        return out


@dataclass(frozen=True)
class ProblemSpec:
    variables: tuple[str, ...]
    algebra: LieAlgebra
    generators: tuple[VectorField, ...]
    invariant: Poly | None = None
    delta: Poly | None = None
    omega: KForm | None = None
    omega_i: KForm | None = None
    cochain: tuple[tuple[tuple[int, int], Poly], ...] = ()
    options: Options = field(default_factory=Options)

    @property
    def mode(self) -> str:
        if self.invariant is not None:
            return "lagrangian"
        if self.omega is not None:
            return "form"
        return "cochain"

    @property
    def base_chart(self) -> Chart:
        return Chart([Variable(n, "coordinate") for n in self.variables])

    @property
    def phase_chart(self) -> Chart:
        return tangent_chart(self.base_chart) if self.mode == "lagrangian" else self.base_chart

    def base_action(self) -> ActionMap:
        return ActionMap(self.algebra, self.base_chart, self.generators, self.options.generators or "antihomomorphism")

    def lagrangian_system(self) -> LagrangianSystem:
        if self.mode != "lagrangian":
            raise ValueError("problem has no Lagrangian")
        return LagrangianSystem(self.base_chart, self.invariant, self.delta, self.base_action())

    def action(self) -> ActionMap:
        """The action on the phase chart (lifted in Lagrangian mode)."""
        if self.mode == "lagrangian":
            return self.lagrangian_system().lifted_action()
        return self.base_action()

    def system(self, base_point=None) -> PhaseSystem:
        bp = tuple(base_point) if base_point is not None else (self.options.base_point or ())
        if self.mode == "lagrangian":
            return PhaseSystem.from_lagrangian(self.lagrangian_system(), bp)
        if self.mode == "form":
            return PhaseSystem(self.omega, self.omega_i, self.base_action(), bp)
        raise ValueError("problem has neither a Lagrangian nor a 2-form")

    def explicit_cochain(self, action: ActionMap | None = None) -> Cochain | None:
        if not self.cochain:
            return None
        action = action or self.action()
        return Cochain(action, 2, {idx: v.rechart(action.chart) for idx, v in self.cochain})

    def render(self) -> str:
        lines = ["vars " + " ".join(self.variables)]
        if self.invariant is not None:
            lines.append(f"lagrangian.invariant {self.invariant}")
            lines.append(f"lagrangian.delta {self.delta}")
        if self.omega is not None:
            lines.append(f"form.omega {self.omega}")
            lines.append(f"form.invariant {self.omega_i}")
        lines.append(f"algebra dim {self.algebra.dim}")
        echart = Chart(self.algebra.names)
        for (i, j), v in sorted(self.algebra.nonzero_brackets().items()):
            comb = Poly(echart, {tuple(int(k == m) for m in range(self.algebra.dim)): c for k, c in enumerate(v)})
            lines.append(f"bracket e{i + 1} e{j + 1} = {comb}")
        for k, X in enumerate(self.generators):
            lines.append(f"generator e{k + 1} = {X}")
        for (i, j), v in self.cochain:
            lines.append(f"cochain e{i + 1} e{j + 1} = {v}")
        lines.extend(self.options.render())
        return "\n".join(lines) + "\n"


# --- parsing -------------------------------------------------------------------


@dataclass
class _Line:
    number: int
    keyword: str
    rest: str
    offset: int  # 0-based column where ``rest`` starts
    start: int  # 0-based column of the keyword


def _split_lines(text: str) -> list[_Line]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if not stripped:
            continue
        lead = len(body) - len(stripped)
        kw = stripped.split(None, 1)[0]
        rest_start = lead + len(kw)
        rest = body[rest_start:]
        pad = len(rest) - len(rest.lstrip())
        out.append(_Line(n, kw, rest.strip(), rest_start + pad, lead))
    return out


def _basis_index(tok: str, dim: int, line: int, column: int) -> int:
    if not (tok.startswith("e") and tok[1:].isdigit()):
        raise ProblemSyntaxError(f"expected a basis name like e1, got {tok!r}", line, column)
    k = int(tok[1:]) - 1
    if not 0 <= k < dim:
        raise ProblemSyntaxError(f"basis element {tok} outside algebra of dimension {dim}", line, column)
    return k


def _lhs_rhs(ln: _Line) -> tuple[list[str], str, int]:
    if "=" not in ln.rest:
        raise ProblemSyntaxError(f"expected '=' in {ln.keyword} line", ln.number, ln.offset + len(ln.rest) + 1)
    lhs, rhs = ln.rest.split("=", 1)
    rhs_off = ln.offset + len(lhs) + 1
    rhs_off += len(rhs) - len(rhs.lstrip())
    return lhs.split(), rhs.strip(), rhs_off


def _column_of(ln: _Line, tok: str) -> int:
    return ln.offset + ln.rest.find(tok) + 1


def _parse_option(ln: _Line, acc: dict):
    parts = ln.rest.split()
    if not parts:
        raise ProblemSyntaxError("option needs a key", ln.number, ln.offset + 1)
    key, vals = parts[0], parts[1:]
    if key not in _OPTION_KEYS:
        raise ProblemSyntaxError(f"unknown option {key!r}", ln.number, ln.offset + 1)
    if not vals:
        raise ProblemSyntaxError(f"option {key} needs a value", ln.number, ln.offset + len(key) + 1)
    col = _column_of(ln, vals[0])
    try:
        if key == "sign_convention":
            acc[key] = SignConvention.parse(vals[0])
        elif key == "base_point":
            acc[key] = tuple(Fraction(v) for v in vals)
        elif key in ("degree_bound", "seed", "trials"):
            acc[key] = int(vals[0])
        elif key in ("fd_step", "fd_tol"):
            acc[key] = float(vals[0])
        elif key == "generators":
            if vals[0] not in ("antihomomorphism", "homomorphism"):
                raise ValueError(vals[0])
            acc[key] = vals[0]
    except ValueError:
        raise ProblemSyntaxError(f"bad value for option {key}: {' '.join(vals)!r}", ln.number, col) from None


def parse_problem(text: str) -> ProblemSpec:
    lines = _split_lines(text)
    if not lines:
        raise ProblemSyntaxError("empty problem file", 1, 1)
    end_line = len(text.splitlines()) + 1

    by_kw: dict[str, list[_Line]] = {}
    known = {
        "vars",
        "lagrangian.invariant",
        "lagrangian.delta",
        "form.omega",
        "form.invariant",
        "algebra",
        "bracket",
        "generator",
        "cochain",
        "option",
    }
    for ln in lines:
        if ln.keyword not in known:
            raise ProblemSyntaxError(f"unknown directive {ln.keyword!r}", ln.number, ln.start + 1)
        by_kw.setdefault(ln.keyword, []).append(ln)

    def single(kw):
        got = by_kw.get(kw, [])
        if len(got) > 1:
            raise ProblemSyntaxError(f"duplicate {kw} line", got[1].number, 1)
        return got[0] if got else None

    vline = single("vars")
    if vline is None:
        raise ProblemSyntaxError("missing 'vars' line", lines[0].number, 1)
    names = vline.rest.split()
    if not names:
        raise ProblemSyntaxError("'vars' needs at least one name", vline.number, vline.offset + 1)
    if len(set(names)) != len(names):
        raise ProblemSyntaxError("duplicate variable name", vline.number, vline.offset + 1)
    for nm in names:
        if not nm.isidentifier():
            raise ProblemSyntaxError(f"bad variable name {nm!r}", vline.number, _column_of(vline, nm))
    base = Chart([Variable(n, "coordinate") for n in names])

    lag_inv, lag_delta = single("lagrangian.invariant"), single("lagrangian.delta")
    f_omega, f_inv = single("form.omega"), single("form.invariant")
    if (lag_inv or lag_delta) and (f_omega or f_inv):
        ln = f_omega or f_inv
        raise ProblemSyntaxError("a problem is either Lagrangian or form-based, not both", ln.number, 1)

    invariant = delta = omega = omega_i = None
    if lag_inv or lag_delta:
        if lag_inv is None:
            raise ProblemSyntaxError("missing lagrangian.invariant", lag_delta.number, 1)
        try:
            tq = tangent_chart(base)
        except ValueError as exc:
            raise ProblemSyntaxError(str(exc), vline.number, vline.offset + 1) from None
        invariant = parse_poly(tq, lag_inv.rest, lag_inv.number, lag_inv.offset)
        delta = parse_poly(tq, lag_delta.rest, lag_delta.number, lag_delta.offset) if lag_delta else Poly.zero(tq)
        phase = tq
    else:
        phase = base
        if f_omega is not None:
            omega = parse_form(base, f_omega.rest, 2, f_omega.number, f_omega.offset)
            omega_i = parse_form(base, f_inv.rest, 2, f_inv.number, f_inv.offset) if f_inv else omega
        elif f_inv is not None:
            raise ProblemSyntaxError("form.invariant without form.omega", f_inv.number, 1)

    aline = single("algebra")
    if aline is None:
        raise ProblemSyntaxError("missing 'algebra dim N' line", end_line, 1)
    parts = aline.rest.split()
    if len(parts) != 2 or parts[0] != "dim" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise ProblemSyntaxError("expected 'algebra dim N' with N >= 1", aline.number, aline.offset + 1)
    dim = int(parts[1])
    echart = Chart([f"e{k + 1}" for k in range(dim)])

    brackets = {}
    for ln in by_kw.get("bracket", []):
        lhs, rhs, roff = _lhs_rhs(ln)
        if len(lhs) != 2:
            raise ProblemSyntaxError("expected 'bracket eI eJ = ...'", ln.number, ln.offset + 1)
        i = _basis_index(lhs[0], dim, ln.number, _column_of(ln, lhs[0]))
        j = _basis_index(lhs[1], dim, ln.number, ln.offset + ln.rest.find(lhs[1], len(lhs[0])) + 1)
        comb = parse_poly(echart, rhs, ln.number, roff)
        if comb.degree() > 1 or comb.terms.get((0,) * dim):
            raise ProblemSyntaxError("bracket value must be a linear combination of basis elements", ln.number, roff + 1)
        vec = tuple(comb.terms.get(tuple(int(k == m) for m in range(dim)), Fraction(0)) for k in range(dim))
        if (i, j) in brackets:
            raise ProblemSyntaxError(f"duplicate bracket for e{i + 1} e{j + 1}", ln.number, 1)
        brackets[(i, j)] = vec
    algebra = LieAlgebra(dim, brackets)

    gens: list[VectorField | None] = [None] * dim
    for ln in by_kw.get("generator", []):
        lhs, rhs, roff = _lhs_rhs(ln)
        if len(lhs) != 1:
            raise ProblemSyntaxError("expected 'generator eI = ...'", ln.number, ln.offset + 1)
        k = _basis_index(lhs[0], dim, ln.number, _column_of(ln, lhs[0]))
        if gens[k] is not None:
            raise ProblemSyntaxError(f"duplicate generator for e{k + 1}", ln.number, 1)
        gens[k] = parse_vector_field(base, rhs, ln.number, roff)
    missing = [k for k, g in enumerate(gens) if g is None]
    if missing:
        raise ProblemSyntaxError(f"missing generator for e{missing[0] + 1}", end_line, 1)

    cochain = {}
    for ln in by_kw.get("cochain", []):
        lhs, rhs, roff = _lhs_rhs(ln)
        if len(lhs) != 2:
            raise ProblemSyntaxError("expected 'cochain eI eJ = ...'", ln.number, ln.offset + 1)
        i = _basis_index(lhs[0], dim, ln.number, _column_of(ln, lhs[0]))
        j = _basis_index(lhs[1], dim, ln.number, ln.offset + ln.rest.find(lhs[1], len(lhs[0])) + 1)
        if i == j:
            raise ProblemSyntaxError("cochain arguments must differ", ln.number, ln.offset + 1)
        v = parse_poly(phase, rhs, ln.number, roff)
        if i > j:
            i, j, v = j, i, -v
        if (i, j) in cochain:
            raise ProblemSyntaxError(f"duplicate cochain value for e{i + 1} e{j + 1}", ln.number, 1)
        if v:
            cochain[(i, j)] = v

    acc: dict = {}
    for ln in by_kw.get("option", []):
        _parse_option(ln, acc)
    options = Options(**acc)
    if options.base_point is not None and len(options.base_point) != phase.dimension:
        ln = next(x for x in by_kw["option"] if x.rest.startswith("base_point"))
        raise ProblemSyntaxError(
            f"base_point needs {phase.dimension} coordinates, got {len(options.base_point)}", ln.number, ln.offset + 1
        )

    spec = ProblemSpec(
        variables=tuple(names),
        algebra=algebra,
        generators=tuple(gens),
        invariant=invariant,
        delta=delta,
        omega=omega,
        omega_i=omega_i,
        cochain=tuple(sorted(cochain.items())),
        options=options,
    )
    spec.base_action()  # surfaces NotHomomorphism / ChartMismatch early
    return spec


def load_problem(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
