import warnings
from fractions import Fraction

import pytest

from builders import (
    BASE2,
    TQ2,
    free_particle,
    heisenberg,
    kinetic,
    random_coupled_systems,
    random_poly,
    rng_for,
    translations,
    worked_example,
)
from cocyclelab.cohomology import canonical_cocycle, coboundary, cohomologous
from cocyclelab.errors import (
    DegenerateLagrangian,
    HypothesisFails,
    IdentityFails,
    NonConstantDeterminant,
    NotClosedOneForm,
    NotInvariant,
    NotSymplectic,
)
from cocyclelab.exactalg import Chart, Poly
from cocyclelab.formscalc import KForm, SignConvention, VectorField, canonical_form, interior_product, is_closed, wedge
from cocyclelab.liealg import ActionMap, LieAlgebra, tangent_chart, tangent_lift
from cocyclelab.mechanics import (
    LagrangianSystem,
    PhaseSystem,
    decompose,
    delta_X,
    integrate_exact,
    lagrangian_two_form,
    legendre,
    momentum_maps,
    remark1_reconcile,
    remark2_residual,
    sigma,
    two_form_by_pullback,
    two_form_by_second_derivatives,
    verify_prop2,
)

q1, q2, v1, v2 = (Poly.var(TQ2, n) for n in TQ2.names)
dq1, dq2, dv1, dv2 = (KForm.d(TQ2, n) for n in TQ2.names)
OMEGA_I = wedge(dq1, dv1) + wedge(dq2, dv2)
A, B = SignConvention.A, SignConvention.B


def symplectic_translations() -> PhaseSystem:
    c = Chart(["q1", "q2", "p1", "p2"])
    omega = canonical_form(c, [("q1", "p1"), ("q2", "p2")])
    act = ActionMap(LieAlgebra.abelian(2), c, [VectorField.partial(c, "q1"), VectorField.partial(c, "q2")])
    return PhaseSystem(omega, omega, act)


def se2_system() -> PhaseSystem:
    c = Chart(["q1", "q2", "p1", "p2"])
    x = {n: Poly.var(c, n) for n in c.names}
    d = {n: VectorField.partial(c, n) for n in c.names}
    rot = d["q1"] * -x["q2"] + d["q2"] * x["q1"] + d["p1"] * -x["p2"] + d["p2"] * x["p1"]
    g = LieAlgebra(3, {(0, 1): (0, 0, 1), (0, 2): (0, -1, 0)})
    omega = canonical_form(c, [("q1", "p1"), ("q2", "p2")])
    return PhaseSystem(omega, omega, ActionMap(g, c, [rot, d["q1"], d["q2"]]))


class TestLegendre:
    def test_worked_example(self):
        FL = legendre(kinetic() + q1 ** 2 * v2)
        assert [str(c) for c in FL.components] == ["q1", "q2", "v1", "q1^2 + v2"]

    def test_free_particle(self):
        FL = legendre(kinetic())
        assert [str(c) for c in FL.components] == ["q1", "q2", "v1", "v2"]

    def test_one_dimensional(self):
        tq = tangent_chart(Chart(["q"]))
        q, v = Poly.var(tq, "q"), Poly.var(tq, "v1")
        FL = legendre(v ** 2 * Fraction(1, 2) + q ** 2 * v)
        assert [str(c) for c in FL.components] == ["q", "q^2 + v1"]


class TestLagrangianTwoForm:
    def test_worked_example(self):
        omega = lagrangian_two_form(kinetic() + q1 ** 2 * v2)
        assert omega == OMEGA_I + wedge(dq1, dq2) * (q1 * -2)

    def test_free_particle(self):
        assert lagrangian_two_form(kinetic()) == OMEGA_I

    @pytest.mark.parametrize("k", [Fraction(3), Fraction(-1, 2), Fraction(7, 5)])
    def test_scaled_perturbation(self, k):
        omega = lagrangian_two_form(kinetic() + q1 ** 2 * v2 * k)
        assert omega - OMEGA_I == wedge(dq1, dq2) * (q1 * (-2 * k))

    def test_degenerate(self):
        with pytest.raises(DegenerateLagrangian):
            lagrangian_two_form(v1 ** 2 + q1 * v2)

    def test_both_routes_agree_on_random_lagrangians(self):
        rng = rng_for("routes")
        for _ in range(50):
            c1, c2 = Fraction(rng.choice([1, 2, -3])), Fraction(rng.choice([1, -1, 5]))
            L = v1 ** 2 * c1 + v2 ** 2 * c2 + v1 * v2 * Fraction(rng.randint(-1, 1))
            L = L + random_poly(TQ2, rng, 2, 2).compose([q1, q2, q1 * 0, q2 * 0]) * v1
            L = L + random_poly(TQ2, rng, 2, 2).compose([q1, q2, q1 * 0, q2 * 0]) * v2
            L = L + random_poly(TQ2, rng, 3, 2).compose([q1, q2, q1 * 0, q2 * 0])
            by_pullback = two_form_by_pullback(L)
            assert by_pullback == two_form_by_second_derivatives(L)
            assert is_closed(by_pullback)


class TestDecompose:
    def test_worked_example(self):
        dec = decompose(worked_example())
        assert dec.omega_i == OMEGA_I
        assert dec.delta_omega == wedge(dq1, dq2) * (q1 * -2)

    def test_free_particle(self):
        assert decompose(free_particle()).delta_omega.is_zero()

    def test_noninvariant_split(self):
        L = kinetic() + q1 ** 2 * v2
        sys_ = LagrangianSystem(BASE2, L, Poly.zero(TQ2), translations())
        with pytest.raises(NotInvariant):
            decompose(PhaseSystem.from_lagrangian(sys_))

    def test_noninvariant_form(self):
        omega = OMEGA_I + wedge(dq1, dq2) * (q1 * -2)
        with pytest.raises(NotInvariant):
            decompose(PhaseSystem(omega, omega, tangent_lift(translations())))


class TestMomentumMaps:
    def test_worked_example(self):
        sys_ = worked_example()
        J = momentum_maps(sys_.omega_i, sys_.action)
        assert J.components == (v1, v2)
        assert J((3, -2)) == v1 * 3 - v2 * 2

    def test_canonical_pair(self):
        c = Chart(["q", "p"])
        act = ActionMap(LieAlgebra.abelian(1), c, [VectorField.partial(c, "q")])
        J = momentum_maps(canonical_form(c, [("q", "p")]), act)
        assert J.components == (Poly.var(c, "p"),)

    def test_no_global_momentum(self):
        c = Chart(["q1", "q2"])
        omega = wedge(KForm.d(c, "q1"), KForm.d(c, "q2")) * (Poly.var(c, "q1") ** 2 + 1)
        act = ActionMap(LieAlgebra.abelian(1), c, [VectorField.partial(c, "q1")])
        with pytest.raises(NotClosedOneForm):
            momentum_maps(omega, act)

    def test_base_point_normalisation(self):
        sys_ = worked_example()
        bp = (1, 2, 3, -4)
        J = momentum_maps(sys_.omega_i, sys_.action, bp)
        assert [Jk.evaluate(bp) for Jk in J.components] == [0, 0]
        for k, X in enumerate(sys_.action.generators):
            assert interior_product(X, sys_.omega_i) == KForm(TQ2, 1, {(i,): J.components[k].diff(i) for i in range(4)})

    def test_integrate_exact_random(self):
        rng = rng_for("integrate")
        for _ in range(20):
            f = random_poly(TQ2, rng, 3, 4)
            df_ = KForm(TQ2, 1, {(i,): f.diff(i) for i in range(4)})
            g = integrate_exact(df_, (0, 0, 0, 0))
            assert g == f - f.evaluate((0, 0, 0, 0))


class TestSigmaAndDeltaX:
    def test_worked_example_sigma(self):
        sys_ = worked_example()
        J = momentum_maps(sys_.omega_i, sys_.action)
        assert sigma(sys_.omega, J, A).value(0, 1) == q1 * 2
        assert sigma(sys_.omega, J, B).value(0, 1) == q1 * -2

    def test_free_particle_sigma(self):
        sys_ = free_particle()
        J = momentum_maps(sys_.omega_i, sys_.action)
        assert sigma(sys_.omega, J).is_zero()

    def test_symplectic_sigma_is_constant(self):
        sys_ = symplectic_translations()
        J = momentum_maps(sys_.omega, sys_.action)
        assert sigma(sys_.omega, J).is_constant_valued()

    def test_worked_example_delta_x(self):
        sys_ = worked_example()
        J = momentum_maps(sys_.omega_i, sys_.action)
        a1, a2 = Fraction(2), Fraction(5)
        dX = delta_X(sys_.omega, J, (a1, a2))
        assert dX.support() == ("v1", "v2")
        assert dX.components[2] == q1 * (-2 * a2)
        assert dX.components[3] == q1 * (2 * a1)

    def test_delta_x_vanishes(self):
        sys_ = symplectic_translations()
        J = momentum_maps(sys_.omega, sys_.action)
        assert delta_X(sys_.omega, J, (1, 1)).is_zero()
        w = worked_example()
        assert delta_X(w.omega, momentum_maps(w.omega_i, w.action), (0, 0)).is_zero()


class TestProp2:
    def test_worked_example_under_both_flags(self):
        for conv in (A, B):
            res = verify_prop2(worked_example(), conv)
            assert res.passed, res.report.render_text()
            assert res.delta_J.is_zero()
            assert res.residual.is_zero()

    def test_worked_example_orientation(self):
        ra, rb = verify_prop2(worked_example(), A), verify_prop2(worked_example(), B)
        assert ra.report.results["matches_Omega(b,a)"] and not ra.report.results["matches_Omega(a,b)"]
        assert rb.report.results["matches_Omega(a,b)"] and not rb.report.results["matches_Omega(b,a)"]

    def test_free_particle(self):
        res = verify_prop2(free_particle())
        assert res.passed
        assert res.sigma.is_zero() and res.omega_cocycle.is_zero()

    def test_random_family(self):
        for f, sys_ in random_coupled_systems(8):
            res = verify_prop2(sys_)
            assert res.passed, f
            assert all(dX.support() and set(dX.support()) <= {"v1", "v2"} for dX in res.delta_fields if dX)

    def test_cohomologous_with_momentum(self):
        res = verify_prop2(worked_example(), B)
        assert res.sigma - res.oriented == coboundary(res.momenta.cochain())
        beta = cohomologous(res.sigma, res.oriented, 2)
        assert beta is not None and coboundary(beta) == res.sigma - res.oriented

    def test_nonabelian_fixtures_under_a(self):
        for sys_ in (heisenberg(), se2_system()):
            assert verify_prop2(sys_, A).passed

    def test_heisenberg_under_b_shows_omega_i_term(self):
        res = verify_prop2(heisenberg(), B)
        assert res.report.verdict("identity Sigma = Omega + delta J") == "fail"
        assert res.residual.value(0, 1) == -4
        assert res.report.verdict("step J_[a,b] = 2 omega_i(X_a,X_b) - delta J(a,b)") == "pass"
        with pytest.raises(IdentityFails):
            verify_prop2(heisenberg(), B, strict=True)

    def test_hypothesis_failure(self):
        dw = wedge(dq1, dq2) * 2 + wedge(dv1, dv2)
        sys_ = PhaseSystem(OMEGA_I + dw, OMEGA_I, tangent_lift(translations()))
        res = verify_prop2(sys_)
        assert res.hypothesis[(0, 1)] == 4
        assert res.report.verdict("hypothesis omega(dX_a, dX_b) = 0") == "fail"
        assert res.report.verdict("contraction i_{dX_a} omega = i_{X_a} delta_omega") == "pass"
        with pytest.raises(HypothesisFails) as err:
            verify_prop2(sys_, strict=True)
        assert err.value.pair == ("e1", "e2")

    def test_hypothesis_failure_with_rational_brackets(self):
        dw = wedge(dq1, dq2) * (q1 * -2) + wedge(dv1, dv2)
        sys_ = PhaseSystem(OMEGA_I + dw, OMEGA_I, tangent_lift(translations()))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonConstantDeterminant)
            res = verify_prop2(sys_)
        assert not res.passed
        assert res.sigma is None


class TestResidual:
    def test_worked_example(self):
        assert remark2_residual(worked_example(), B).is_zero()
        assert remark2_residual(worked_example(), A).is_zero()

    def test_symplectic_fixtures(self):
        for sys_ in (symplectic_translations(), heisenberg(), se2_system()):
            assert remark2_residual(sys_, A).is_zero()

    def test_constant_shift_abelian(self):
        sys_ = worked_example()
        J = momentum_maps(sys_.omega_i, sys_.action).shifted((5, 0))
        assert remark2_residual(sys_, A, J).is_zero()

    def test_constant_shift_nonabelian(self):
        # the shift enters Sigma through -J_[a,b] and delta J through -beta([a,b]);
        # the two contributions cancel
        sys_ = se2_system()
        J = momentum_maps(sys_.omega, sys_.action).shifted((1, 2, -3))
        assert remark2_residual(sys_, A, J).is_zero()
        shifted_sigma = sigma(sys_.omega, J)
        plain_sigma = sigma(sys_.omega, momentum_maps(sys_.omega, sys_.action))
        assert shifted_sigma != plain_sigma


class TestReconcile:
    def test_symplectic_translations(self):
        res = remark1_reconcile(symplectic_translations())
        assert res.passed
        assert all(v == 0 for v in res.J_bracket_at_x0.values())

    def test_heisenberg(self):
        for conv, expected in ((A, 1), (B, -1)):
            res = remark1_reconcile(heisenberg(), convention=conv)
            assert res.passed, res.report.render_text()
            assert res.sigma.value(0, 1) == expected
            assert res.omega_at_x0[(0, 1)] == 1

    def test_heisenberg_other_base_points(self):
        rng = rng_for("x0")
        for _ in range(10):
            x0 = (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
            assert remark1_reconcile(heisenberg(), x0).passed

    def test_se2_nonzero_j_bracket(self):
        sys_ = se2_system()
        x0 = (1, 2, 3, 4)
        res = remark1_reconcile(PhaseSystem(sys_.omega, sys_.omega_i, sys_.action, x0), x0)
        assert res.passed

    def test_not_symplectic(self):
        with pytest.raises(NotSymplectic):
            remark1_reconcile(worked_example())


def test_canonical_cocycle_of_heisenberg_is_one():
    sys_ = heisenberg()
    assert canonical_cocycle(sys_.omega, sys_.action).value(0, 1) == 1
