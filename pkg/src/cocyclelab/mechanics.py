"""Lagrangian systems, momentum maps and the Sigma/Omega cocycle identities.

Two forms play different roles and are easy to mix up:

* momentum maps integrate ``dJ_a = i_{X_a} omega_i`` with the *invariant*
  part ``omega_i``;
* Poisson brackets ``{J_a, J_b}`` and Hamiltonian fields ``X_{J_a}`` use the
  *full* form ``omega = omega_i + delta_omega``.

Sign bookkeeping. With ``X_f`` defined by ``i_{X_f} omega = df`` and
``{f, g} = s * omega(X_f, X_g)`` (``s = +1`` for convention A, ``-1`` for B),
whenever ``omega(dX_a, dX_b) = 0`` one has exactly

    {J_a, J_b} = s * (Omega(a, b) - 2 dOmega(a, b)),
    J_[a,b] = 2 Omega_i(a, b) - (delta J)(a, b),

where ``Omega``, ``dOmega`` and ``Omega_i`` evaluate ``omega``,
``delta_omega`` and ``omega_i`` on ``(X_a, X_b)``. Hence

    A:  Sigma = Omega(b, a) + delta J
    B:  Sigma = Omega(a, b) + delta J - 4 Omega_i(a, b).

Under A the identity is unconditional. Under B the form
``Sigma = Omega(a, b) + delta J`` holds only where ``Omega_i`` vanishes (true
for translations on a tangent chart, false for the Heisenberg realisation);
checks run under B test that literal form and report a witness when it fails.
:func:`oriented_cocycle` gives the orientation used by each flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cohomology import Cochain, canonical_cocycle, coboundary
from .errors import (
    ChartMismatch,
    DegenerateLagrangian,
    DimensionMismatch,
    HypothesisFails,
    IdentityFails,
    NotClosed,
    NotClosedOneForm,
    NotInvariant,
    NotSymplectic,
)
from .exactalg import Chart, Poly, RatFunc, poly_det, simplify
from .formscalc import (
    KForm,
    PolyMap,
    SignConvention,
    VectorField,
    canonical_form,
    df,
    exterior_derivative,
    hamiltonian_field,
    interior_product,
    lie_derivative,
    pullback,
)
from .liealg import ActionMap, cotangent_chart, is_symplectic, tangent_chart, tangent_lift
from .report import Report


def _as_poly(x, what: str) -> Poly:
    x = simplify(x)
    if isinstance(x, RatFunc):
        raise ValueError(f"{what} is not polynomial: {x}")
    return x


def _pair_label(i: int, j: int) -> str:
    return f"e{i + 1},e{j + 1}"


# --- Lagrangian data --------------------------------------------------------


def _split_tq(tq: Chart) -> tuple[tuple[str, ...], tuple[str, ...]]:
    qs, vs = tq.names_of_kind("coordinate"), tq.names_of_kind("velocity")
    if len(qs) != len(vs) or not qs:
        raise DimensionMismatch("a tangent chart needs as many velocities as coordinates")
    return qs, vs


def fiber_hessian(L: Poly) -> list[list[Poly]]:
    _, vs = _split_tq(L.chart)
    return [[L.diff(a).diff(b) for b in vs] for a in vs]


def legendre(L: Poly) -> PolyMap:
    """FL: (q, v) -> (q, dL/dv)."""
    tq = L.chart
    qs, vs = _split_tq(tq)
    base = Chart(qs)
    tstar = cotangent_chart(base)
    comps = [Poly.var(tq, q) for q in qs] + [L.diff(v) for v in vs]
    return PolyMap(tq, tstar, tuple(comps))


def two_form_by_pullback(L: Poly) -> KForm:
    fl = legendre(L)
    n = len(fl.components) // 2
    names = fl.target.names
    return pullback(fl, canonical_form(fl.target, [(names[i], names[n + i]) for i in range(n)]))


def two_form_by_second_derivatives(L: Poly) -> KForm:
    """sum_i dq^i ^ d(dL/dv^i), expanded into second partials."""
    tq = L.chart
    qs, vs = _split_tq(tq)
    out = KForm.zero(tq, 2)
    for qi, vi in zip(qs, vs):
        p = L.diff(vi)
        dqi = KForm.d(tq, qi)
        for qj in qs:
            c = p.diff(qj)
            if c:
                out = out + (dqi ^ KForm.d(tq, qj)) * c
        for vj in vs:
            c = p.diff(vj)
            if c:
                out = out + (dqi ^ KForm.d(tq, vj)) * c
    return out


def lagrangian_two_form(L: Poly, *, require_regular: bool = True) -> KForm:
    """omega_L = FL^*(sum dq ^ dp), cross-checked against the second-derivative
    expansion. ``require_regular=False`` skips the Hessian test (used for the
    invariant part, which need not be regular on its own)."""
    if require_regular and not poly_det(fiber_hessian(L)):
        raise DegenerateLagrangian("fiber Hessian d^2L/dv dv is singular")
    w1 = two_form_by_pullback(L)
    w2 = two_form_by_second_derivatives(L)
    if w1 != w2:
        raise ArithmeticError(f"two routes to omega_L disagree: {w1} vs {w2}")
    if not exterior_derivative(w1).is_zero():
        raise ArithmeticError("omega_L is not closed")
    return w1


@dataclass(frozen=True)
class LagrangianSystem:
    """L = L_inv + L_delta on TQ with an action on the base Q."""

    base: Chart
    invariant: Poly
    delta: Poly
    action: ActionMap

    def __post_init__(self):
        tq = tangent_chart(self.base)
        if self.action.chart != self.base:
            raise ChartMismatch("action must live on the base chart")
        for part in (self.invariant, self.delta):
            if part.chart != tq:
                raise ChartMismatch(f"Lagrangian part lives on {part.chart!r}, expected {tq!r}")

    @property
    def tq(self) -> Chart:
        return self.invariant.chart

    @property
    def lagrangian(self) -> Poly:
        return self.invariant + self.delta

    def lifted_action(self) -> ActionMap:
        return tangent_lift(self.action, self.tq)


@dataclass(frozen=True)
class PhaseSystem:
    """A closed 2-form, its declared invariant part and a generator action,
    all on one chart. Built directly ("form mode") or from a Lagrangian."""

    omega: KForm
    omega_i: KForm
    action: ActionMap
    base_point: tuple = ()
    lagrangian: LagrangianSystem | None = None

    def __post_init__(self):
        chart = self.omega.chart
        if self.omega_i.chart != chart or self.action.chart != chart:
            raise ChartMismatch("omega, omega_i and the action must share a chart")
        if not self.base_point:
            object.__setattr__(self, "base_point", (Fraction(0),) * chart.dimension)
        bp = tuple(Fraction(x) for x in self.base_point)
        if len(bp) != chart.dimension:
            raise DimensionMismatch(f"base point has {len(bp)} entries, chart has {chart.dimension}")
        object.__setattr__(self, "base_point", bp)

    @property
    def chart(self) -> Chart:
        return self.omega.chart

    @property
    def delta_omega(self) -> KForm:
        return self.omega - self.omega_i

    @classmethod
    def from_lagrangian(cls, system: LagrangianSystem, base_point: Sequence = ()) -> PhaseSystem:
        omega = lagrangian_two_form(system.lagrangian)
        omega_i = lagrangian_two_form(system.invariant, require_regular=False)
        return cls(omega, omega_i, system.lifted_action(), tuple(base_point), system)


# --- decomposition ----------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    omega: KForm
    omega_i: KForm
    delta_omega: KForm


def decompose(system: PhaseSystem) -> Decomposition:
    action = system.action
    if system.lagrangian is not None:
        Li = system.lagrangian.invariant
        for k, X in enumerate(action.generators):
            moved = X(Li)
            if moved:
                raise NotInvariant(f"L_inv is not invariant under e{k + 1}: X(L_inv) = {moved}")
    for k, X in enumerate(action.generators):
        ld = lie_derivative(X, system.omega_i)
        if not ld.is_zero():
            raise NotInvariant(f"omega_i is not invariant under e{k + 1}: L_X omega_i = {ld}")
    dw = system.delta_omega
    if not exterior_derivative(dw).is_zero():
        raise NotClosed("delta_omega is not closed")
    for k, X in enumerate(action.generators):
        if lie_derivative(X, system.omega) != lie_derivative(X, dw):
            raise NotInvariant(f"L_X omega != L_X delta_omega for e{k + 1}")
    return Decomposition(system.omega, system.omega_i, dw)


# --- momentum maps ----------------------------------------------------------


def integrate_exact(alpha: KForm, base_point: Sequence) -> Poly:
    """f with df = alpha and f(base_point) = 0, via straight lines from the
    base point. alpha must be closed."""
    if alpha.degree != 1:
        raise ValueError("integrate_exact needs a 1-form")
    chart = alpha.chart
    n = chart.dimension
    x0 = [Fraction(v) for v in base_point]
    xs = [Poly.var(chart, i) for i in range(n)]
    shift = [xs[i] + x0[i] for i in range(n)]
    unshift = [xs[i] - x0[i] for i in range(n)]
    acc: dict[tuple, Fraction] = {}
    for (i,), c in alpha.coeffs.items():
        c = _as_poly(c, "1-form coefficient")
        for exp, coef in c.compose(shift).terms.items():
            e = list(exp)
            e[i] += 1
            e = tuple(e)
            acc[e] = acc.get(e, Fraction(0)) + coef / (sum(exp) + 1)
    return Poly(chart, acc).compose(unshift)


@dataclass(frozen=True)
class MomentumFamily:
    """J_{e_k} for each basis element, normalised to vanish at ``base_point``."""

    action: ActionMap
    components: tuple[Poly, ...]
    base_point: tuple

    def __call__(self, a) -> Poly:
        a = self.action.algebra.vector(a)
        out = Poly.zero(self.action.chart)
        for ak, J in zip(a, self.components):
            if ak:
                out = out + J * ak
        return out

    def cochain(self) -> Cochain:
        return Cochain(self.action, 1, {(k,): J for k, J in enumerate(self.components)})

    def shifted(self, constants: Sequence) -> MomentumFamily:
        return MomentumFamily(
            self.action,
            tuple(J + Fraction(c) for J, c in zip(self.components, constants)),
            self.base_point,
        )


def momentum_maps(omega_i: KForm, action: ActionMap, base_point: Sequence | None = None) -> MomentumFamily:
    chart = omega_i.chart
    if action.chart != chart:
        raise ChartMismatch("action and omega_i live on different charts")
    bp = tuple(Fraction(x) for x in (base_point or (0,) * chart.dimension))
    comps = []
    for k, X in enumerate(action.generators):
        alpha = interior_product(X, omega_i)
        dalpha = exterior_derivative(alpha)
        if not dalpha.is_zero():
            raise NotClosedOneForm(f"i_X omega_i is not closed for e{k + 1}: d(...) = {dalpha}")
        J = integrate_exact(alpha, bp)
        if df(J) != alpha:
            raise ArithmeticError(f"integration check failed for e{k + 1}")
        comps.append(J)
    return MomentumFamily(action, tuple(comps), bp)


# --- Sigma and friends --------------------------------------------------------


def hamiltonian_fields(omega: KForm, J: MomentumFamily) -> tuple[VectorField, ...]:
    return tuple(hamiltonian_field(omega, Jk) for Jk in J.components)


def bracket_cochain(omega: KForm, J: MomentumFamily, convention=SignConvention.A) -> Cochain:
    """(a, b) -> {J_a, J_b} with respect to ``omega``."""
    s = SignConvention.parse(convention).sign
    XJ = hamiltonian_fields(omega, J)
    return Cochain.from_function(
        J.action, 2, lambda i, j: _as_poly(omega(XJ[i], XJ[j]) * s, "Poisson bracket")
    )


def sigma(omega: KForm, J: MomentumFamily, convention=SignConvention.A) -> Cochain:
    """Sigma(a, b) = {J_a, J_b} - J_[a,b], brackets taken in ``omega``."""
    alg = J.action.algebra
    br = bracket_cochain(omega, J, convention)
    return Cochain.from_function(
        J.action, 2, lambda i, j: br.value(i, j) - J(alg.bracket(alg.basis(i), alg.basis(j)))
    )


def delta_X(omega: KForm, J: MomentumFamily, a) -> VectorField:
    """X_a - X_{J_a}."""
    return J.action.generator(a) - hamiltonian_field(omega, J(a))


def oriented_cocycle(omega: KForm, action: ActionMap, convention=SignConvention.A) -> Cochain:
    """Omega in the orientation that matches Sigma under ``convention``:
    Omega(b, a) for A, Omega(a, b) for B."""
    s = SignConvention.parse(convention).sign
    return canonical_cocycle(omega, action) * (-s)


# --- bracket identities ------------------------------------------------------


@dataclass
class Prop2Result:
    convention: SignConvention
    decomposition: Decomposition
    momenta: MomentumFamily
    delta_fields: tuple[VectorField, ...]
    hypothesis: dict[tuple[int, int], Poly | RatFunc]
    omega_cocycle: Cochain
    oriented: Cochain
    delta_J: Cochain
    sigma: Cochain | None
    residual: Cochain | None
    report: Report = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.report.passed


def _conventions(convention: SignConvention) -> dict[str, str]:
    return {
        "sign_convention": convention.value,
        "hamiltonian_field": "i_{X_f} omega = df",
        "poisson_bracket": "omega(X_f, X_g)" if convention is SignConvention.A else "omega(X_g, X_f)",
        "action": "a.f = -X_a(f), generators reverse brackets",
    }


_PROP2_LATER_CHECKS = (
    "identity Sigma = Omega + delta J",
    "cohomologous Sigma ~ Omega with beta = J",
    "step {J_a,J_b} = s(omega(X_a,X_b) - 2 delta_omega(X_a,X_b))",
    "step J_[a,b] = 2 omega_i(X_a,X_b) - delta J(a,b)",
)


def verify_prop2(system: PhaseSystem, convention=SignConvention.A, *, strict: bool = False) -> Prop2Result:
    convention = SignConvention.parse(convention)
    s = convention.sign
    dec = decompose(system)
    action = system.action
    alg = action.algebra
    n = alg.dim
    omega, omega_i, dw = dec.omega, dec.omega_i, dec.delta_omega
    J = momentum_maps(omega_i, action, system.base_point)
    gens = action.generators
    XJ = hamiltonian_fields(omega, J)
    dX = tuple(gens[k] - XJ[k] for k in range(n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    rep = Report("prop2", _conventions(convention))

    hyp = {(i, j): simplify(omega(dX[i], dX[j])) for i, j in pairs}
    bad = [(p, v) for p, v in hyp.items() if v]
    rep.check(
        "hypothesis omega(dX_a, dX_b) = 0",
        not bad,
        witness={"pair": _pair_label(*bad[0][0]), "value": str(bad[0][1])} if bad else None,
    )
    if bad and strict:
        i, j = bad[0][0]
        raise HypothesisFails((f"e{i + 1}", f"e{j + 1}"), bad[0][1])

    contraction_bad = [k for k in range(n) if interior_product(dX[k], omega) != interior_product(gens[k], dw)]
    rep.check(
        "contraction i_{dX_a} omega = i_{X_a} delta_omega",
        not contraction_bad,
        witness={"basis": f"e{contraction_bad[0] + 1}"} if contraction_bad else None,
    )

    Omega = canonical_cocycle(omega, action)
    oriented = Omega * (-s)
    dJ = coboundary(J.cochain())
    try:
        Sig = sigma(omega, J, convention)
    except ValueError as exc:
        # brackets outside the polynomial ring: only possible when the
        # hypothesis already failed on a form with non-constant determinant
        for name in _PROP2_LATER_CHECKS:
            rep.check(name, False, witness={"detail": str(exc)})
        rep.results["hypothesis"] = {_pair_label(*p): str(v) for p, v in hyp.items()}
        return Prop2Result(convention, dec, J, dX, hyp, Omega, oriented, dJ, None, None, rep)
    residual = Sig - (oriented + dJ)
    wit = next(iter(sorted(residual.values)), None)
    rep.check(
        "identity Sigma = Omega + delta J",
        residual.is_zero(),
        witness={"pair": _pair_label(*wit), "residual": str(residual.values[wit])} if wit else None,
        detail="Omega taken as Omega(b,a)" if s == 1 else "Omega taken as Omega(a,b)",
    )
    if wit and strict:
        raise IdentityFails(residual)
    rep.check("cohomologous Sigma ~ Omega with beta = J", coboundary(J.cochain()) == Sig - oriented)

    # the two intermediate steps of the argument, checked pair by pair
    br = bracket_cochain(omega, J, convention)
    step1, step2 = [], []
    for i, j in pairs:
        lhs = br.value(i, j)
        rhs = (omega(gens[i], gens[j]) - dw(gens[i], gens[j]) * 2) * s
        if lhs != rhs:
            step1.append((i, j))
        Jab = J(alg.bracket(alg.basis(i), alg.basis(j)))
        if Jab != omega_i(gens[i], gens[j]) * 2 - dJ.value(i, j):
            step2.append((i, j))
    rep.check(
        "step {J_a,J_b} = s(omega(X_a,X_b) - 2 delta_omega(X_a,X_b))",
        not step1,
        witness={"pair": _pair_label(*step1[0])} if step1 else None,
    )
    rep.check(
        "step J_[a,b] = 2 omega_i(X_a,X_b) - delta J(a,b)",
        not step2,
        witness={"pair": _pair_label(*step2[0])} if step2 else None,
    )

    diff = Sig - dJ
    rep.results["matches_Omega(a,b)"] = diff == Omega
    rep.results["matches_Omega(b,a)"] = diff == -Omega
    rep.results["omega"] = str(omega)
    rep.results["omega_i"] = str(omega_i)
    rep.results["delta_omega"] = str(dw)
    rep.results["J"] = {f"J_e{k + 1}": str(Jk) for k, Jk in enumerate(J.components)}
    rep.results["X_J"] = {f"X_J_e{k + 1}": str(X) for k, X in enumerate(XJ)}
    rep.results["delta_X"] = {f"dX_e{k + 1}": str(X) for k, X in enumerate(dX)}
    rep.results["Omega"] = Omega.to_dict()
    rep.results["deltaJ"] = dJ.to_dict()
    rep.results["brackets"] = {f"{{J_e{i + 1},J_e{j + 1}}}": str(br.value(i, j)) for i, j in pairs}
    rep.results["Sigma"] = Sig.to_dict()
    rep.results["hypothesis"] = {_pair_label(*p): str(v) for p, v in hyp.items()}
    rep.results["residual"] = residual.to_dict()
    rep.results["Omega_i"] = canonical_cocycle(omega_i, action).to_dict()

    return Prop2Result(convention, dec, J, dX, hyp, Omega, oriented, dJ, Sig, residual, rep)


def remark2_residual(
    system: PhaseSystem, convention=SignConvention.A, momenta: MomentumFamily | None = None
) -> Cochain:
    """c(a, b) = Sigma(a, b) - h(a, b) with h = Omega + delta J (Omega oriented
    for ``convention``). Callers decide what to do if c is not constant."""
    dec = decompose(system)
    J = momenta or momentum_maps(dec.omega_i, system.action, system.base_point)
    h = oriented_cocycle(dec.omega, system.action, convention) + coboundary(J.cochain())
    return sigma(dec.omega, J, convention) - h


@dataclass
class Remark1Result:
    sigma: Cochain
    omega_at_x0: dict[tuple[int, int], Fraction]
    J_bracket_at_x0: dict[tuple[int, int], Fraction]
    report: Report

    @property
    def passed(self) -> bool:
        return self.report.passed


def remark1_reconcile(system: PhaseSystem, x0: Sequence | None = None, convention=SignConvention.A) -> Remark1Result:
    """For a symplectic action: Sigma is constant, and
    Sigma(a,b) = s * Omega(a,b)(x0) - J_[a,b](x0)
    i.e. the two real cocycles differ by the real coboundary of a -> J_a(x0)."""
    convention = SignConvention.parse(convention)
    s = convention.sign
    action = system.action
    omega = system.omega
    if not system.delta_omega.is_zero():
        raise NotSymplectic("delta_omega is nonzero; the action does not preserve omega")
    if not is_symplectic(action, omega):
        raise NotSymplectic("some generator does not preserve omega")
    chart = system.chart
    x0 = tuple(Fraction(v) for v in (x0 if x0 is not None else system.base_point))
    if len(x0) != chart.dimension:
        raise DimensionMismatch("x0 has the wrong number of coordinates")
    J = momentum_maps(omega, action, system.base_point)
    Sig = sigma(omega, J, convention)
    Omega = canonical_cocycle(omega, action)
    alg = action.algebra
    n = alg.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    rep = Report("reconcile", _conventions(convention), inputs={"x0": [str(v) for v in x0]})
    rep.check("symplectic action", True)
    nonconst = [p for p, v in Sig.values.items() if not v.is_constant()]
    rep.check(
        "Sigma constant-valued",
        not nonconst,
        witness={"pair": _pair_label(*nonconst[0]), "value": str(Sig.values[nonconst[0]])} if nonconst else None,
    )
    om0, jb0, bad = {}, {}, []
    for i, j in pairs:
        om0[(i, j)] = Omega.value(i, j).evaluate(x0)
        jb0[(i, j)] = J(alg.bracket(alg.basis(i), alg.basis(j))).evaluate(x0)
        if Sig.value(i, j).evaluate(x0) - s * om0[(i, j)] + jb0[(i, j)] != 0:
            bad.append((i, j))
    rep.check(
        "Sigma - s*Omega(x0) = -J_[a,b](x0)",
        not bad,
        witness={"pair": _pair_label(*bad[0])} if bad else None,
    )
    rep.results["Sigma"] = Sig.to_dict()
    rep.results["Omega(x0)"] = {_pair_label(*p): str(v) for p, v in om0.items()}
    rep.results["J_[a,b](x0)"] = {_pair_label(*p): str(v) for p, v in jb0.items()}
    return Remark1Result(Sig, om0, jb0, rep)
