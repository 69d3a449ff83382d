"""Independent cross-checks for the symbolic engine.

Two tiers:

* exact: evaluate both sides of an identity at seeded random rational points.
  Evaluation never normalises expressions, so it is independent of the
  canonical-form machinery. A failure is a genuine counterexample.
* floating point: central finite differences of coefficient functions, used to
  validate ``d`` and the Lie bracket without trusting the symbolic derivative
  rules that produced them.

The pointwise Hamiltonian helpers solve ``A^T X = grad f`` at a single rational
point with their own elimination routine, so bracket checks do not go through
:func:`cocyclelab.exactalg.ratfunc_solve`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .exactalg import Chart, Poly, RatFunc
from .formscalc import KForm, SignConvention, VectorField, exterior_derivative, lie_bracket

DEFAULT_SEED = 20020514


@dataclass(frozen=True)
class TrialPlan:
    seed: int = DEFAULT_SEED
    trials: int = 50
    bound: int = 10
    fd_step: float = 1e-4
    fd_tol: float = 1e-6

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.bound < 1:
            raise ValueError("coordinate bound must be positive")
        if not self.fd_tol > 0 or not self.fd_step > 0:
            raise ValueError("fd step and tolerance must be positive")

    def rng(self, salt: int = 0) -> random.Random:
        return random.Random(self.seed * 1_000_003 + salt)

    def random_rational(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randint(-self.bound, self.bound), rng.randint(1, self.bound))

    def points(self, dim: int, salt: int = 0, count: int | None = None) -> list[tuple[Fraction, ...]]:
        rng = self.rng(salt)
        return [
            tuple(self.random_rational(rng) for _ in range(dim))
            for _ in range(self.trials if count is None else count)
        ]


@dataclass
class Verdict:
    passed: bool
    trials: int
    counterexample: tuple | None = None
    lhs: object = None
    rhs: object = None
    max_error: float = 0.0
    detail: str = ""

    def __bool__(self):
        return self.passed

    def witness(self) -> dict | None:
        if self.passed:
            return None
        return {
            "point": [str(v) for v in self.counterexample] if self.counterexample else None,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "detail": self.detail,
        }


Pointwise = Callable[[tuple], Fraction]


def _as_pointwise(x) -> Pointwise:
    if isinstance(x, (Poly, RatFunc)):
        return x.evaluate
    if isinstance(x, (int, Fraction)):
        v = Fraction(x)
        return lambda _p: v
    if callable(x):
        return x
    raise TypeError(f"cannot evaluate {type(x).__name__} pointwise")


def _dimension(*xs) -> int | None:
    for x in xs:
        if isinstance(x, (Poly, RatFunc)):
            return x.chart.dimension
    return None


def point_check(lhs, rhs, plan: TrialPlan = TrialPlan(), *, dim: int | None = None, salt: int = 0) -> Verdict:
    """Compare two sides exactly at ``plan.trials`` rational points.

    Sides may be Poly, RatFunc, constants, or callables taking a point tuple.
    Points where either side has a vanishing denominator are redrawn. The
    lexicographically smallest failing point is reported.
    """
    dim = dim if dim is not None else _dimension(lhs, rhs)
    if dim is None:
        raise ValueError("dimension needed when both sides are callables")
    if isinstance(lhs, (Poly, RatFunc)) and isinstance(rhs, (Poly, RatFunc)) and lhs.chart != rhs.chart:
        raise ValueError("sides live on different charts")
    fl, fr = _as_pointwise(lhs), _as_pointwise(rhs)
    rng = plan.rng(salt)
    fails = []
    done = attempts = 0
    while done < plan.trials:
        attempts += 1
        if attempts > 20 * plan.trials:
            raise ValueError("too many sample points hit a vanishing denominator")
        x = tuple(plan.random_rational(rng) for _ in range(dim))
        try:
            a, b = fl(x), fr(x)
        except ZeroDivisionError:
            continue
        done += 1
        if a != b:
            fails.append((x, a, b))
    if not fails:
        return Verdict(True, done)
    x, a, b = min(fails, key=lambda t: t[0])
    return Verdict(False, done, x, a, b, detail=f"{len(fails)} of {done} points disagree")


def all_pass(verdicts: Sequence[Verdict]) -> Verdict:
    for v in verdicts:
        if not v:
            return v
    return Verdict(True, sum(v.trials for v in verdicts))


# --- pointwise linear algebra ------------------------------------------------


def _solve_dense(M: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(M)
    A = [list(row) + [b[i]] for i, row in enumerate(M)]
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            raise ZeroDivisionError("form is degenerate at this point")
        A[k], A[p] = A[p], A[k]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k] / A[k][k]
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    return [A[i][n] / A[i][i] for i in range(n)]


def form_matrix_at(omega: KForm, x) -> list[list[Fraction]]:
    n = omega.chart.dimension
    A = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), c in omega.coeffs.items():
        v = c.evaluate(x)
        A[i][j] = v
        A[j][i] = -v
    return A


def field_at(X: VectorField, x) -> list[Fraction]:
    return [c.evaluate(x) for c in X.components]


def gradient_at(f, x) -> list[Fraction]:
    return [f.diff(i).evaluate(x) for i in range(f.chart.dimension)]


def pair_at(A, u, w) -> Fraction:
    """omega(u, w) for tangent vectors at a point."""
    n = len(u)
    return sum((u[i] * A[i][j] * w[j] for i in range(n) for j in range(n) if A[i][j] and u[i] and w[j]), Fraction(0))


def contract_at(u, A) -> list[Fraction]:
    """Components of i_u omega at a point."""
    n = len(u)
    return [sum((u[i] * A[i][j] for i in range(n) if u[i]), Fraction(0)) for j in range(n)]


def hamiltonian_at(omega: KForm, f, x) -> list[Fraction]:
    A = form_matrix_at(omega, x)
    n = len(A)
    At = [[A[j][i] for j in range(n)] for i in range(n)]
    return _solve_dense(At, gradient_at(f, x))


def bracket_at(omega: KForm, f, g, x, convention=SignConvention.A) -> Fraction:
    s = SignConvention.parse(convention).sign
    A = form_matrix_at(omega, x)
    n = len(A)
    At = [[A[j][i] for j in range(n)] for i in range(n)]
    Xf = _solve_dense(At, gradient_at(f, x))
    Xg = _solve_dense(At, gradient_at(g, x))
    return s * pair_at(A, Xf, Xg)


# --- finite differences ------------------------------------------------------


def _fd(fun: Callable[[list[float]], float], x: list[float], i: int, h: float) -> float:
    def at(t):
        y = list(x)
        y[i] += t
        return fun(y)

    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)


def _close(a: float, b: float, tol: float) -> tuple[bool, float]:
    err = abs(a - b) / max(1.0, abs(b))
    return err <= tol, err


def fd_check_d(alpha: KForm, plan: TrialPlan = TrialPlan(), *, salt: int = 0) -> Verdict:
    """Finite-difference derivative of each coefficient against symbolic d."""
    chart = alpha.chart
    n = chart.dimension
    k = alpha.degree
    if k >= n:
        raise ValueError("form degree must be below the chart dimension")
    d_sym = exterior_derivative(alpha)
    pts = plan.points(n, salt)
    worst = 0.0
    for x in pts:
        xf = [float(v) for v in x]
        for I in combinations(range(n), k + 1):
            total = 0.0
            for r, i in enumerate(I):
                rest = I[:r] + I[r + 1 :]
                c = alpha.coeffs.get(rest)
                if c is None:
                    continue
                total += (-1) ** r * _fd(c.evaluate_float, xf, i, plan.fd_step)
            sym = d_sym.coeffs.get(I)
            symv = sym.evaluate_float(xf) if sym is not None else 0.0
            ok, err = _close(total, symv, plan.fd_tol)
            worst = max(worst, err)
            if not ok:
                return Verdict(False, len(pts), x, total, symv, err, f"component {I}")
    return Verdict(True, len(pts), max_error=worst)


def _random_test_polys(chart: Chart, rng: random.Random, count: int) -> list[Poly]:
    n = chart.dimension
    out = [Poly.var(chart, i) for i in range(n)]
    for _ in range(count):
        terms = {}
        for _ in range(3):
            e = [0] * n
            for _ in range(rng.randint(1, 2)):
                e[rng.randrange(n)] += 1
            terms[tuple(e)] = Fraction(rng.randint(-3, 3) or 1)
        out.append(Poly(chart, terms))
    return out


def fd_check_bracket(
    X: VectorField, Y: VectorField, plan: TrialPlan = TrialPlan(), *, tests: Sequence[Poly] | None = None, salt: int = 0
) -> Verdict:
    """(XY - YX) f by finite differences of x -> (Y f)(x) against [X, Y] f."""
    if X.chart != Y.chart:
        raise ValueError("fields live on different charts")
    chart = X.chart
    n = chart.dimension
    tests = list(tests) if tests is not None else _random_test_polys(chart, plan.rng(salt + 1), 3)
    br = lie_bracket(X, Y)
    pts = plan.points(n, salt, count=max(1, plan.trials // 5))
    worst = 0.0

    def directional(Z: VectorField, f: Poly):
        grads = [f.diff(i) for i in range(n)]

        def g(y):
            return sum(c.evaluate_float(y) * grads[i].evaluate_float(y) for i, c in enumerate(Z.components) if c)

        return g

    for f in tests:
        Yf, Xf = directional(Y, f), directional(X, f)
        for x in pts:
            xf = [float(v) for v in x]
            xv = [c.evaluate_float(xf) for c in X.components]
            yv = [c.evaluate_float(xf) for c in Y.components]
            num = sum(xv[i] * _fd(Yf, xf, i, plan.fd_step) for i in range(n) if xv[i]) - sum(
                yv[i] * _fd(Xf, xf, i, plan.fd_step) for i in range(n) if yv[i]
            )
            sym = sum(c.evaluate_float(xf) * f.diff(i).evaluate_float(xf) for i, c in enumerate(br.components) if c)
            ok, err = _close(num, sym, plan.fd_tol)
            worst = max(worst, err)
            if not ok:
                return Verdict(False, len(pts) * len(tests), x, num, sym, err, f"test function {f}")
    return Verdict(True, len(pts) * len(tests), max_error=worst)


# --- pointwise re-verification of the bracket identities -------------------


@dataclass
class PointwiseSuite:
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def prop2_pointwise(omega: KForm, omega_i: KForm, action, J, convention=SignConvention.A, plan: TrialPlan = TrialPlan()) -> PointwiseSuite:
    """Re-check, point by point, the hypothesis omega(dX_a, dX_b) = 0, the
    identity Sigma = Omega + delta J in the orientation for ``convention``,
    the contraction identity i_{dX_a} omega = i_{X_a} delta_omega and the
    first intermediate bracket identity. Uses only evaluated matrices."""
    s = SignConvention.parse(convention).sign
    alg = action.algebra
    n = alg.dim
    dim = omega.chart.dimension
    gens = action.generators
    Js = J.components
    dw = omega - omega_i
    out = PointwiseSuite()

    def dX_at(k, x):
        t = field_at(gens[k], x)
        h = hamiltonian_at(omega, Js[k], x)
        return [a - b for a, b in zip(t, h)]

    def J_bracket_at(i, j, x):
        v = alg.bracket(alg.basis(i), alg.basis(j))
        return sum((c * Js[k].evaluate(x) for k, c in enumerate(v) if c), Fraction(0))

    for k in range(n):
        out.verdicts[f"contraction e{k + 1}"] = all_pass(
            [
                point_check(
                    (lambda x, k=k, c=c: contract_at(dX_at(k, x), form_matrix_at(omega, x))[c]),
                    (lambda x, k=k, c=c: contract_at(field_at(gens[k], x), form_matrix_at(dw, x))[c]),
                    plan,
                    dim=dim,
                    salt=100 + k,
                )
                for c in range(dim)
            ]
        )
    for i, j in combinations(range(n), 2):
        lab = f"e{i + 1},e{j + 1}"
        out.verdicts[f"hypothesis {lab}"] = point_check(
            lambda x, i=i, j=j: pair_at(form_matrix_at(omega, x), dX_at(i, x), dX_at(j, x)),
            0,
            plan,
            dim=dim,
            salt=200 + 10 * i + j,
        )

        def sigma_at(x, i=i, j=j):
            return bracket_at(omega, Js[i], Js[j], x, convention) - J_bracket_at(i, j, x)

        def rhs_at(x, i=i, j=j):
            A = form_matrix_at(omega, x)
            Om = pair_at(A, field_at(gens[i], x), field_at(gens[j], x))
            # (delta J)(a,b) = a.J_b - b.J_a - J_[a,b], with a.f = -X_a f
            aJb = -sum(u * g for u, g in zip(field_at(gens[i], x), gradient_at(Js[j], x)))
            bJa = -sum(u * g for u, g in zip(field_at(gens[j], x), gradient_at(Js[i], x)))
            return -s * Om + aJb - bJa - J_bracket_at(i, j, x)

        out.verdicts[f"identity {lab}"] = point_check(sigma_at, rhs_at, plan, dim=dim, salt=300 + 10 * i + j)

        def step_rhs(x, i=i, j=j):
            ti, tj = field_at(gens[i], x), field_at(gens[j], x)
            return s * (pair_at(form_matrix_at(omega, x), ti, tj) - 2 * pair_at(form_matrix_at(dw, x), ti, tj))

        out.verdicts[f"bracket step {lab}"] = point_check(
            lambda x, i=i, j=j: bracket_at(omega, Js[i], Js[j], x, convention),
            step_rhs,
            plan,
            dim=dim,
            salt=400 + 10 * i + j,
        )
    return out
