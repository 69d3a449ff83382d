"""Finite-dimensional Lie algebras and their actions on a chart.

The algebra acts on functions by ``a . f = -X_a(f)``. That is a
representation exactly when ``a -> X_a`` reverses brackets,
``[X_a, X_b] = -X_{[a,b]}``, which is what infinitesimal generators of a
left action do. :class:`ActionMap` stores generators in that orientation;
pass ``convention="homomorphism"`` to supply bracket-preserving fields,
which are then negated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import BadStructureConstants, ChartMismatch, DimensionMismatch, NotHomomorphism
from .exactalg import Chart, Poly, Variable
from .formscalc import KForm, VectorField, lie_bracket, lie_derivative

Vector = tuple  # of Fraction


def _vec(a, n) -> Vector:
    a = tuple(Fraction(x) for x in a)
    if len(a) != n:
        raise DimensionMismatch(f"algebra vector of length {len(a)}, algebra dimension {n}")
    return a


class LieAlgebra:
    """Structure constants ``C[a][b][c]`` with ``[e_a, e_b] = sum_c C[a][b][c] e_c``."""

    def __init__(self, dim: int, brackets: Mapping[tuple[int, int], Sequence] | None = None):
        if dim < 1:
            raise BadStructureConstants("algebra dimension must be positive")
        self.dim = dim
        C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        seen = {}
        for (a, b), v in (brackets or {}).items():
            if not (0 <= a < dim and 0 <= b < dim):
                raise BadStructureConstants(f"basis index out of range in [e{a + 1}, e{b + 1}]")
            v = _vec(v, dim)
            if a == b:
                if any(v):
                    raise BadStructureConstants(f"[e{a + 1}, e{a + 1}] must vanish")
                continue
            if (b, a) in seen and seen[(b, a)] != tuple(-x for x in v):
                raise BadStructureConstants(
                    f"antisymmetry violated: [e{a + 1},e{b + 1}] and [e{b + 1},e{a + 1}] are not opposite"
                )
            seen[(a, b)] = v
            C[a][b] = list(v)
            C[b][a] = [-x for x in v]
        self.C = C
        self._check_jacobi()

    @classmethod
    def abelian(cls, dim: int) -> LieAlgebra:
        return cls(dim)

    def _check_jacobi(self):
        for a, b, c in combinations(range(self.dim), 3):
            ea, eb, ec = self.basis(a), self.basis(b), self.basis(c)
            s = [
                x + y + z
                for x, y, z in zip(
                    self.bracket(self.bracket(ea, eb), ec),
                    self.bracket(self.bracket(eb, ec), ea),
                    self.bracket(self.bracket(ec, ea), eb),
                )
            ]
            if any(s):
                raise BadStructureConstants(
                    f"Jacobi identity fails on (e{a + 1}, e{b + 1}, e{c + 1})"
                )

    def basis(self, i: int) -> Vector:
        return tuple(Fraction(1 if k == i else 0) for k in range(self.dim))

    def zero(self) -> Vector:
        return (Fraction(0),) * self.dim

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"e{i + 1}" for i in range(self.dim))

    def vector(self, a) -> Vector:
        return _vec(a, self.dim)

    def bracket(self, a, b) -> Vector:
        a, b = _vec(a, self.dim), _vec(b, self.dim)
        out = [Fraction(0)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj or i == j:
                    continue
                f = ai * bj
                for k, c in enumerate(self.C[i][j]):
                    if c:
                        out[k] += f * c
        return tuple(out)

    def is_abelian(self) -> bool:
        return not any(any(c) for row in self.C for c in row)

    def nonzero_brackets(self) -> dict[tuple[int, int], Vector]:
        return {
            (i, j): tuple(self.C[i][j])
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            if any(self.C[i][j])
        }

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.C == other.C

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.nonzero_brackets().items()))))

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, brackets={self.nonzero_brackets()})"


CONVENTIONS = ("antihomomorphism", "homomorphism")


class ActionMap:
    """Basis generators ``X_{e_i}`` on ``chart``, extended linearly."""

    def __init__(
        self,
        algebra: LieAlgebra,
        chart: Chart,
        generators: Sequence[VectorField],
        convention: str = "antihomomorphism",
    ):
        if convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        if len(generators) != algebra.dim:
            raise DimensionMismatch(f"{len(generators)} generators for a {algebra.dim}-dimensional algebra")
        for X in generators:
            if X.chart != chart:
                raise ChartMismatch(f"generator on {X.chart!r}, action on {chart!r}")
        if convention == "homomorphism":
            generators = [-X for X in generators]
        self.algebra = algebra
        self.chart = chart
        self.generators = tuple(generators)
        self._check_brackets()

    def _check_brackets(self):
        for a, b in combinations(range(self.algebra.dim), 2):
            lhs = lie_bracket(self.generators[a], self.generators[b])
            rhs = -self.generator(self.algebra.bracket(self.algebra.basis(a), self.algebra.basis(b)))
            if lhs != rhs:
                raise NotHomomorphism(
                    f"[X_e{a + 1}, X_e{b + 1}] = {lhs} but -X_[e{a + 1},e{b + 1}] = {rhs}"
                )

    def generator(self, a) -> VectorField:
        a = self.algebra.vector(a)
        out = VectorField.zero(self.chart)
        for ai, X in zip(a, self.generators):
            if ai:
                out = out + X * ai
        return out

    def module_action(self, a, f):
        """a . f = -L_{X_a} f."""
        return -self.generator(a)(f)

    def __eq__(self, other):
        return (
            isinstance(other, ActionMap)
            and self.algebra == other.algebra
            and self.chart == other.chart
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.algebra, self.chart, self.generators))


def bracket(algebra: LieAlgebra, a, b) -> Vector:
    return algebra.bracket(a, b)


def generator(action: ActionMap, a) -> VectorField:
    return action.generator(a)


def module_action(action: ActionMap, a, f):
    return action.module_action(a, f)


def tangent_chart(base: Chart) -> Chart:
    """Base coordinates followed by velocities ``v1..vn``."""
    vel = [Variable(f"v{i + 1}", "velocity") for i in range(base.dimension)]
    clash = {v.name for v in vel} & set(base.names)
    if clash:
        raise ValueError(f"base variable names {sorted(clash)} collide with velocity names")
    return Chart([Variable(n, "coordinate") for n in base.names] + vel)


def cotangent_chart(base: Chart) -> Chart:
    mom = [Variable(f"p{i + 1}", "momentum") for i in range(base.dimension)]
    clash = {v.name for v in mom} & set(base.names)
    if clash:
        raise ValueError(f"base variable names {sorted(clash)} collide with momentum names")
    return Chart([Variable(n, "coordinate") for n in base.names] + mom)


def tangent_lift(action: ActionMap, tq: Chart | None = None) -> ActionMap:
    """Lift xi^i d/dq^i to xi^i d/dq^i + (d xi^i/d q^j) v^j d/dv^i."""
    base = action.chart
    tq = tq or tangent_chart(base)
    n = base.dimension
    vel = [Poly.var(tq, n + j) for j in range(n)]
    lifted = []
    for X in action.generators:
        comps = [c.rechart(tq) for c in X.components]
        vcomps = []
        for i in range(n):
            acc = Poly.zero(tq)
            for j in range(n):
                d = comps[i].diff(j)
                if d:
                    acc = acc + d * vel[j]
            vcomps.append(acc)
        lifted.append(VectorField(tq, comps + vcomps))
    return ActionMap(action.algebra, tq, lifted)


@dataclass(frozen=True)
class SymplecticReport:
    per_basis: tuple[bool, ...]
    lie_derivatives: tuple[KForm, ...]

    @property
    def symplectic(self) -> bool:
        return all(self.per_basis)

    def __bool__(self):
        return self.symplectic


def is_symplectic(action: ActionMap, omega: KForm) -> SymplecticReport:
    if omega.degree != 2:
        raise ValueError("is_symplectic needs a 2-form")
    lds = tuple(lie_derivative(X, omega) for X in action.generators)
    return SymplecticReport(tuple(ld.is_zero() for ld in lds), lds)
