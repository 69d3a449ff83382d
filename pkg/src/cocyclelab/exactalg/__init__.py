"""Exact polynomial and rational-function arithmetic over the rationals."""

from .linsolve import LinearSolution, poly_det, ratfunc_solve, solve_rational
from .poly import Chart, Poly, Variable, as_fraction, variables
from .ratfunc import RatFunc, monic, poly_gcd, simplify


def differentiate(p, var):
    return p.diff(var)


def evaluate(p, point):
    return p.evaluate(point)


__all__ = [
    "Chart", "Poly", "Variable", "RatFunc", "LinearSolution",
    "as_fraction", "variables", "differentiate", "evaluate",
    "poly_det", "ratfunc_solve", "solve_rational", "poly_gcd", "monic", "simplify",
]
