"""Acceptance criteria 1-10. Each test appends one PASS/FAIL line that is
printed in the terminal summary (and immediately with ``-s``)."""

import json
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from builders import (
    R4,
    TQ2,
    fixture_actions,
    heisenberg,
    lie_derivative_by_components,
    random_coupled_systems,
    random_field,
    random_form,
    random_poly,
    random_symplectic,
    random_symplectic_constant_det,
    random_triangular_map,
    rng_for,
)
from conftest import ACCEPTANCE_LINES
from cocyclelab.cli import main
from cocyclelab.cohomology import (
    Cochain,
    basis_element,
    canonical_cocycle,
    coboundary,
    is_cocycle,
    jacobi_defect,
    solve_coboundary,
)
from cocyclelab.exactalg import Chart, Poly
from cocyclelab.formscalc import (
    KForm,
    SignConvention,
    VectorField,
    exterior_derivative,
    hamiltonian_field,
    interior_product,
    is_closed,
    lie_derivative,
    poisson_bracket,
    pullback,
    wedge,
)
from cocyclelab.liealg import ActionMap, LieAlgebra
from cocyclelab.mechanics import (
    PhaseSystem,
    delta_X,
    lagrangian_two_form,
    momentum_maps,
    remark1_reconcile,
    remark2_residual,
    sigma,
    verify_prop2,
)
from cocyclelab.oracle import (
    TrialPlan,
    all_pass,
    bracket_at,
    fd_check_d,
    field_at,
    form_matrix_at,
    hamiltonian_at,
    pair_at,
    point_check,
    prop2_pointwise,
)
from cocyclelab.problem import load_problem

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"
A, B = SignConvention.A, SignConvention.B

q1, q2, v1, v2 = (Poly.var(TQ2, n) for n in TQ2.names)
dq1, dq2, dv1, dv2 = (KForm.d(TQ2, n) for n in TQ2.names)


@contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    """Times the block, records a PASS/FAIL line and re-raises failures."""
    notes: list[str] = []
    start = time.perf_counter()
    try:
        yield notes
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
    except BaseException as exc:
        line = f"C{number} FAIL  {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    extra = "; ".join(notes)
    line = f"C{number} PASS  {title} [{elapsed:.2f}s{'; ' + extra if extra else ''}]"
    ACCEPTANCE_LINES.append(line)
    print(line)


def family():
    """Systems of criteria 5, 6 and 9: worked example, free particle, 20 random couplings."""
    spec = load_problem(FIX / "worked_example.cocycle")
    out = [("worked example", spec.system()), ("free particle", load_problem(FIX / "free_particle.cocycle").system())]
    out += [(f"f = {f}", s) for f, s in random_coupled_systems(20)]
    return out


# --- 1 ---------------------------------------------------------------------


def test_c1_worked_example_golden(capsys):
    with criterion(1, "worked example reproduced exactly from the fixture") as notes:
        start = time.perf_counter()
        assert main(["prop2", str(FIX / "worked_example.cocycle"), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert main(["two-form", str(FIX / "worked_example.cocycle"), "--json"]) == 0
        pipeline = time.perf_counter() - start
        assert pipeline < 1.0, f"pipeline took {pipeline:.2f}s"
        assert json.loads(capsys.readouterr().out)["results"]["omega"] == "-2*q1*dq1^dq2 + dq1^dv1 + dq2^dv2"

        spec = load_problem(FIX / "worked_example.cocycle")
        system = spec.system()
        omega = system.omega
        assert omega == wedge(dq1, dv1) + wedge(dq2, dv2) + wedge(dq1, dq2) * (q1 * -2)
        assert lagrangian_two_form(spec.lagrangian_system().lagrangian) == omega

        J = momentum_maps(system.omega_i, system.action)
        rng = rng_for("c1")
        vecs = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
        vecs += [(Fraction(rng.randint(-9, 9)), Fraction(rng.randint(-9, 9))) for _ in range(8)]
        for a in vecs:
            assert J(a) == v1 * a[0] + v2 * a[1]

        Omega = canonical_cocycle(omega, system.action)
        assert Omega.value(0, 1) == q1 * -2
        assert coboundary(J.cochain()).is_zero()

        for a in vecs:
            dX = delta_X(omega, J, a)
            assert set(dX.support()) <= {"v1", "v2"}
            c1, c2 = dX.components[2], dX.components[3]
            assert c1 in (q1 * (2 * a[1]), q1 * (-2 * a[1]))
            assert c2 in (q1 * (2 * a[0]), q1 * (-2 * a[0]))

        # printed bracket: -2 q1 a1 b2 + 2 q1 b1 a2
        matches = []
        for conv in (A, B):
            ok = True
            for a in vecs:
                for b in vecs:
                    printed = q1 * (-2 * a[0] * b[1] + 2 * b[0] * a[1])
                    ok &= poisson_bracket(omega, J(a), J(b), conv) == printed
                    assert poisson_bracket(omega, J(a), J(b), conv) in (printed, -printed)
            if ok:
                matches.append(conv)
        assert matches == [B], matches

        golden = json.loads((GOLDEN / "worked_example.prop2.json").read_text())
        assert payload == golden
        assert golden["conventions"]["sign_convention"] == "paper-B"
        assert golden["results"]["Omega(e1,e2)"] == "-2*q1" and golden["results"]["deltaJ"] == "0"
        assert golden["results"]["{J_e1,J_e2}"] == "-2*q1"
        notes.append(f"pipeline {pipeline:.2f}s; printed signs match flag B only")


# --- 2 ---------------------------------------------------------------------


def test_c2_canonical_cocycle_is_closed():
    with criterion(2, "delta Omega = 0 on random closed nondegenerate forms x fixture actions", limit=30.0) as notes:
        rng = rng_for("c2")
        actions = fixture_actions()
        count = 0
        for _ in range(25):
            omega = random_symplectic(R4, rng)
            assert is_closed(omega)
            for name, act in actions.items():
                Omega = canonical_cocycle(omega, act)
                assert coboundary(Omega).is_zero(), name
                count += 1
        assert count >= 100
        notes.append(f"{count} pairs")


# --- 3 ---------------------------------------------------------------------


def test_c3_delta_squared():
    with criterion(3, "delta o delta = 0 on random cochains over four algebras") as notes:
        count = 0
        for name, act in fixture_actions().items():
            rng = rng_for("c3", name)
            for k in range(50):
                beta = Cochain.from_function(act, k % 2, lambda *idx: random_poly(act.chart, rng, 2, 3))
                assert coboundary(coboundary(beta)).is_zero(), name
                count += 1
        assert count >= 200
        notes.append(f"{count} cochains")


# --- 4 ---------------------------------------------------------------------


def _basis_triples(alpha):
    return list(combinations(range(alpha.algebra.dim), 3))


def _defects(alpha):
    return {t: jacobi_defect(alpha, *(basis_element(alpha, k) for k in t)) for t in _basis_triples(alpha)}


def test_c4_jacobi_iff_cocycle():
    with criterion(4, "modified-bracket Jacobi holds iff cocycle") as notes:
        rng = rng_for("c4")
        positives = 0
        for name, act in fixture_actions().items():
            if act.algebra.dim < 3:
                continue
            for _ in range(5):
                Omega = canonical_cocycle(random_symplectic(R4, rng), act)
                assert is_cocycle(Omega)
                assert all(d.is_zero() for d in _defects(Omega).values()), name
                positives += 1
            for _ in range(5):
                alpha = Cochain.from_function(act, 2, lambda *idx: random_poly(R4, rng, 2, 3))
                vanishes = all(d.is_zero() for d in _defects(alpha).values())
                assert vanishes == bool(is_cocycle(alpha)), name

        X3 = Chart(["q1", "q2", "q3"])
        act = ActionMap(LieAlgebra.abelian(3), X3, [VectorField.partial(X3, n) for n in X3.names])
        alpha = Cochain(act, 2, {(0, 1): Poly.var(X3, "q3")})
        chk = is_cocycle(alpha)
        assert not chk and chk.witness == (0, 1, 2) and chk.value
        defect = _defects(alpha)[(0, 1, 2)]
        assert defect and defect.is_constant()
        notes.append(f"{positives} canonical cocycles; witness (e1,e2,e3) defect {defect}")


# --- 5 and 6 ---------------------------------------------------------------


def test_c5_bracket_identity_end_to_end():
    with criterion(5, "hypothesis, Sigma = Omega + delta J and residual on 22 systems", limit=10.0) as notes:
        systems = family()
        assert len(systems) >= 22
        for label, sys_ in systems:
            for conv in (A, B):
                res = verify_prop2(sys_, conv)
                assert all(v == 0 for v in res.hypothesis.values()), label
                assert res.sigma == res.oriented + res.delta_J, label
                assert res.residual.is_zero(), label
                assert remark2_residual(sys_, conv).is_zero(), label
                assert res.passed, (label, res.report.render_text())
        notes.append(f"{len(systems)} systems under both flags")


def test_c6_contraction_identity():
    with criterion(6, "i_{dX_a} omega = i_{X_a} delta_omega on every system of criterion 5") as notes:
        systems = family()
        checked = 0
        for label, sys_ in systems:
            J = momentum_maps(sys_.omega_i, sys_.action)
            for k, X in enumerate(sys_.action.generators):
                dX = X - hamiltonian_field(sys_.omega, J.components[k])
                assert interior_product(dX, sys_.omega) == interior_product(X, sys_.delta_omega), (label, k)
                checked += 1
        notes.append(f"{checked} generators")


# --- 7 ---------------------------------------------------------------------


SYMPLECTIC_FIXTURES = ["heisenberg", "se2", "symplectic_translations", "affine_line", "free_particle"]


def test_c7_symplectic_constancy_and_reconciliation():
    with criterion(7, "Sigma constant on symplectic fixtures; base-point bookkeeping closes") as notes:
        rng = rng_for("c7")
        for name in SYMPLECTIC_FIXTURES:
            sys_ = load_problem(FIX / f"{name}.cocycle").system()
            alg = sys_.action.algebra
            assert sys_.delta_omega.is_zero(), name
            J = momentum_maps(sys_.omega, sys_.action)
            sig_a, sig_b = sigma(sys_.omega, J, A), sigma(sys_.omega, J, B)
            assert sig_a.is_constant_valued(), name
            # flag B flips the bracket but not J_[a,b]: Sigma_B = -Sigma_A - 2 J_[a,b]
            for (i, j), v in sig_b.values.items():
                assert v == -sig_a.value(i, j) - J(alg.bracket(alg.basis(i), alg.basis(j))) * 2, name
            if alg.is_abelian():
                assert sig_b.is_constant_valued(), name
            points = [None] + [tuple(Fraction(rng.randint(-4, 4)) for _ in range(sys_.chart.dimension)) for _ in range(3)]
            for x0 in points:
                shifted = PhaseSystem(sys_.omega, sys_.omega_i, sys_.action, x0 or ())
                res = remark1_reconcile(shifted, x0, A)
                assert res.passed, (name, x0)
                res_b = remark1_reconcile(shifted, x0, B)
                assert res_b.report.verdict("Sigma - s*Omega(x0) = -J_[a,b](x0)") == "pass", (name, x0)

        heis = load_problem(FIX / "heisenberg.cocycle").system()
        values = {}
        for conv in (A, B):
            res = remark1_reconcile(heis, convention=conv)
            values[conv] = res.sigma.value(0, 1)
            assert res.omega_at_x0[(0, 1)] == 1
        assert {values[A], values[B]} == {Poly.constant(heis.chart, 1), Poly.constant(heis.chart, -1)}
        assert canonical_cocycle(heisenberg().omega, heisenberg().action).value(0, 1) == 1
        notes.append(f"Heisenberg Sigma(e1,e2) = {values[A]} under A, {values[B]} under B")


# --- 8 ---------------------------------------------------------------------


def test_c8_calculus_core():
    with criterion(8, "d^2 = 0, Cartan, pullback, Poisson-Jacobi on 50 inputs each") as notes:
        rng = rng_for("c8")
        for i in range(50):
            alpha = random_form(R4, i % 3, rng, max_deg=3)
            assert exterior_derivative(exterior_derivative(alpha)).is_zero()

        for i in range(50):
            X, alpha = random_field(R4, rng), random_form(R4, i % 4, rng)
            cartan = interior_product(X, exterior_derivative(alpha))
            if alpha.degree:
                cartan = cartan + exterior_derivative(interior_product(X, alpha))
            assert cartan == lie_derivative_by_components(X, alpha)
            assert lie_derivative(X, alpha) == cartan

        for _ in range(50):
            phi = random_triangular_map(R4, rng)
            alpha = random_form(R4, rng.randint(0, 2), rng)
            beta = random_form(R4, rng.randint(0, 1), rng)
            assert pullback(phi, wedge(alpha, beta)) == wedge(pullback(phi, alpha), pullback(phi, beta))
            assert pullback(phi, exterior_derivative(alpha)) == exterior_derivative(pullback(phi, alpha))

        for _ in range(50):
            omega = random_symplectic_constant_det(R4, rng)
            assert is_closed(omega)
            f, g, h = (random_poly(R4, rng) for _ in range(3))

            def br(a, b):
                return poisson_bracket(omega, a, b)

            assert br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g)) == 0
        notes.append("200 exact checks")


# --- 9 ---------------------------------------------------------------------


def test_c9_oracle_independence():
    with criterion(9, "pointwise re-verification at 50 rational points and finite differences") as notes:
        plan = TrialPlan()
        sys_ = load_problem(FIX / "worked_example.cocycle").system()
        omega, act = sys_.omega, sys_.action
        J = momentum_maps(sys_.omega_i, act)

        # criterion 1 identities, evaluated without the symbolic layer
        expected_omega = lambda x: [  # noqa: E731
            [0, -2 * x[0], 1, 0],
            [2 * x[0], 0, 0, 1],
            [-1, 0, 0, 0],
            [0, -1, 0, 0],
        ]
        verdicts = [
            point_check(lambda x: form_matrix_at(omega, x), expected_omega, plan, dim=4, salt=1),
            point_check(J.components[0], v1, plan, salt=2),
            point_check(J.components[1], v2, plan, salt=3),
            point_check(
                lambda x: pair_at(form_matrix_at(omega, x), field_at(act.generators[0], x), field_at(act.generators[1], x)),
                lambda x: -2 * x[0],
                plan,
                dim=4,
                salt=4,
            ),
            point_check(
                lambda x: bracket_at(omega, J.components[0], J.components[1], x, B), lambda x: -2 * x[0], plan, dim=4, salt=5
            ),
        ]
        for k in range(2):
            verdicts.append(
                point_check(
                    lambda x, k=k: [t - h for t, h in zip(field_at(act.generators[k], x), hamiltonian_at(omega, J.components[k], x))],
                    lambda x, k=k: field_at(delta_X(omega, J, act.algebra.basis(k)), x),
                    plan,
                    dim=4,
                    salt=6 + k,
                )
            )
        first = all_pass(verdicts)
        assert first, first.witness()

        # criteria 5 and 6 identities on every system, both flags
        for label, s in family():
            Js = momentum_maps(s.omega_i, s.action)
            for conv in (A, B):
                suite = prop2_pointwise(s.omega, s.omega_i, s.action, Js, conv, plan)
                assert suite.passed, (label, {k: v.witness() for k, v in suite.verdicts.items() if not v})

        # exterior derivatives by finite differences
        rng = rng_for("c9")
        fd = [fd_check_d(omega, plan)] + [fd_check_d(KForm.function(Jk), plan, salt=k) for k, Jk in enumerate(J.components)]
        fd += [fd_check_d(random_form(R4, k % 3, rng, max_deg=3), plan, salt=10 + k) for k in range(9)]
        worst = max(v.max_error for v in fd)
        assert all(fd) and worst <= 1e-6
        notes.append(f"{plan.trials} points per identity; worst fd error {worst:.1e}")


# --- 10 --------------------------------------------------------------------


def test_c10_triviality_certificate():
    with criterion(10, "coboundary solve: verified beta for worked Omega, certificate for central cocycle") as notes:
        sys_ = load_problem(FIX / "worked_example.cocycle").system()
        Omega = canonical_cocycle(sys_.omega, sys_.action)
        res = solve_coboundary(Omega, 2)
        assert res.trivial and res.verify()
        assert coboundary(res.beta) == Omega and res.beta.max_degree() <= 2

        spec = load_problem(FIX / "central_trivial.cocycle")
        alpha = spec.explicit_cochain()
        assert alpha.is_constant_valued() and all(X.is_zero() for X in spec.action().generators)
        none = solve_coboundary(alpha, 2)
        assert not none.trivial and none.beta is None
        assert none.certificate and none.verify()
        cert = {k: str(v) for k, v in none.certificate.items()}
        notes.append(f"beta = {res.beta.to_dict()}; certificate {cert}")
