"""Exact linear algebra: fraction-free elimination over polynomial rings and
sparse Gauss-Jordan over the rationals with an infeasibility certificate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import DimensionMismatch, SingularMatrix
from .poly import Poly
from .ratfunc import RatFunc, simplify


def _check_square(A):
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("matrix must be square")
    return n


def _bareiss(M: list[list[Poly]], ncols_pivot: int):
    """In-place fraction-free forward elimination. Returns (sign, rank_ok)."""
    n = len(M)
    m = len(M[0]) if M else 0
    sign = 1
    prev = None
    for k in range(ncols_pivot):
        p = next((i for i in range(k, n) if M[i][k]), None)
        if p is None:
            return sign, False
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, m):
                v = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = v.divexact(prev) if prev is not None else v
            M[i][k] = M[i][k] * 0
        prev = M[k][k]
    return sign, True


def poly_det(A: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant by Bareiss elimination; every intermediate division is exact."""
    n = _check_square(A)
    if n == 0:
        raise DimensionMismatch("empty matrix")
    M = [list(row) for row in A]
    sign, ok = _bareiss(M, n)
    if not ok:
        return M[0][0] * 0
    return M[n - 1][n - 1] * sign


def ratfunc_solve(A: Sequence[Sequence[Poly]], b: Sequence[Poly]) -> list:
    """Solve ``A x = b`` exactly. Entries of the result are Poly when their
    reduced denominator is constant, RatFunc otherwise."""
    n = _check_square(A)
    if len(b) != n:
        raise DimensionMismatch("right-hand side length does not match matrix")
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    _, ok = _bareiss(M, n)
    if not ok:
        raise SingularMatrix("matrix is singular over the rational function field")
    # After Bareiss, M[n-1][n-1] is det(A) up to sign and X_i = det * x_i are
    # polynomials (Cramer numerators); each back-substitution division is exact.
    det = M[n - 1][n - 1]
    X: list = [None] * n
    for i in range(n - 1, -1, -1):
        acc = M[i][n] * det
        for j in range(i + 1, n):
            if M[i][j]:
                acc = acc - M[i][j] * X[j]
        X[i] = acc.divexact(M[i][i])
    return [simplify(RatFunc(Xi, det)) for Xi in X]


@dataclass
class LinearSolution:
    """Outcome of :func:`solve_rational`.

    When infeasible, ``certificate`` is a row vector y with y·M = 0 and
    y·b = 1, which proves no solution exists.
    """

    solution: list[Fraction] | None
    certificate: dict[int, Fraction] | None
    rank: int

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def solve_rational(rows: Sequence[dict[int, Fraction]], rhs: Sequence[Fraction], ncols: int) -> LinearSolution:
    """Sparse Gauss-Jordan on ``M x = rhs`` (rows given as {column: value}).

    Free variables are set to zero, so the returned particular solution is
    deterministic.
    """
    m = len(rows)
    R = [dict(r) for r in rows]
    B = [Fraction(v) for v in rhs]
    T = [{i: Fraction(1)} for i in range(m)]
    pivots = []
    r = 0
    for col in range(ncols):
        p = next((i for i in range(r, m) if R[i].get(col)), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        B[r], B[p] = B[p], B[r]
        T[r], T[p] = T[p], T[r]
        inv = 1 / R[r][col]
        R[r] = {k: v * inv for k, v in R[r].items()}
        B[r] *= inv
        T[r] = {k: v * inv for k, v in T[r].items()}
        for i in range(m):
            if i != r:
                f = R[i].get(col)
                if f:
                    for k, v in R[r].items():
                        nv = R[i].get(k, 0) - f * v
                        if nv:
                            R[i][k] = nv
                        else:
                            R[i].pop(k, None)
                    B[i] -= f * B[r]
                    for k, v in T[r].items():
                        nv = T[i].get(k, 0) - f * v
                        if nv:
                            T[i][k] = nv
                        else:
                            T[i].pop(k, None)
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if B[i]:
            scale = 1 / B[i]
            return LinearSolution(None, {k: v * scale for k, v in T[i].items()}, r)
    x = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = B[i]
    return LinearSolution(x, None, r)
