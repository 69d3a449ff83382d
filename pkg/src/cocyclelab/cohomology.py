"""Chevalley-Eilenberg cochains of a Lie algebra with values in C^inf(M).

A degree-n cochain stores one value per strictly increasing basis tuple and is
extended to arbitrary arguments by alternation and multilinearity. The module
structure comes from the :class:`~cocyclelab.liealg.ActionMap`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable

from .errors import ChartMismatch, NotClosed, UnsupportedDegree
from .exactalg import Poly, solve_rational
from .formscalc import KForm, _perm_sign, exterior_derivative
from .liealg import ActionMap

MAX_INPUT_DEGREE = 2


class Cochain:
    __slots__ = ("action", "degree", "values")

    def __init__(self, action: ActionMap, degree: int, values=None):
        if degree < 0 or degree > MAX_INPUT_DEGREE + 1:
            raise UnsupportedDegree(f"cochain degree {degree} outside 0..{MAX_INPUT_DEGREE + 1}")
        self.action = action
        self.degree = degree
        chart = action.chart
        clean = {}
        for idx, v in (values or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"cochain index {idx} is not increasing of length {degree}")
            if isinstance(v, (int, Fraction)):
                v = Poly.constant(chart, v)
            if v.chart != chart:
                raise ChartMismatch(f"cochain value on {v.chart!r}, action on {chart!r}")
            if v:
                clean[idx] = v
        self.values = clean

    @classmethod
    def from_function(cls, action: ActionMap, degree: int, fn: Callable) -> Cochain:
        """Build from ``fn(i1, ..., in)`` evaluated on increasing basis indices."""
        return cls(
            action,
            degree,
            {idx: fn(*idx) for idx in combinations(range(action.algebra.dim), degree)},
        )

    @classmethod
    def zero(cls, action: ActionMap, degree: int) -> Cochain:
        return cls(action, degree)

    @property
    def algebra(self):
        return self.action.algebra

    @property
    def chart(self):
        return self.action.chart

    def value(self, *idx: int) -> Poly:
        """Value on basis elements in any order (alternating)."""
        if len(idx) != self.degree:
            raise ValueError(f"degree-{self.degree} cochain takes {self.degree} arguments")
        if len(set(idx)) != len(idx):
            return Poly.zero(self.chart)
        perm = sorted(range(len(idx)), key=lambda k: idx[k])
        v = self.values.get(tuple(sorted(idx)))
        if v is None:
            return Poly.zero(self.chart)
        return v if _perm_sign(perm) > 0 else -v

    def __call__(self, *vectors) -> Poly:
        """Multilinear alternating evaluation on algebra vectors."""
        if len(vectors) != self.degree:
            raise ValueError(f"degree-{self.degree} cochain takes {self.degree} arguments")
        vecs = [self.algebra.vector(v) for v in vectors]
        total = Poly.zero(self.chart)
        for idx, val in self.values.items():
            det = Fraction(0)
            for perm in permutations(range(self.degree)):
                t = Fraction(_perm_sign(perm))
                for k, p in enumerate(perm):
                    t *= vecs[k][idx[p]]
                    if not t:
                        break
                det += t
            if det:
                total = total + val * det
        return total

    def _check(self, other: Cochain):
        if not isinstance(other, Cochain):
            raise TypeError("expected a Cochain")
        if other.degree != self.degree or other.action != self.action:
            raise ChartMismatch("cochains live on different degrees or actions")

    def __add__(self, other):
        self._check(other)
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals[k] + v if k in vals else v
        return Cochain(self.action, self.degree, vals)

    def __neg__(self):
        return Cochain(self.action, self.degree, {k: -v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return Cochain(self.action, self.degree, {k: v * c for k, v in self.values.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and self.action == other.action and self.values == other.values

    def __hash__(self):
        return hash((self.degree, frozenset(self.values.items())))

    def is_zero(self) -> bool:
        return not self.values

    def max_degree(self) -> int:
        """Largest total polynomial degree among the values (-1 if zero)."""
        return max((v.degree() for v in self.values.values()), default=-1)

    def is_constant_valued(self) -> bool:
        return all(v.is_constant() for v in self.values.values())

    def at_point(self, point) -> Cochain:
        """Real-valued cochain obtained by evaluating every value at ``point``."""
        return Cochain(self.action, self.degree, {k: v.evaluate(point) for k, v in self.values.items()})

    def label(self, idx) -> str:
        return ",".join(f"e{i + 1}" for i in idx)

    def to_dict(self) -> dict[str, str]:
        """Every increasing basis tuple, zeros included, as canonical strings."""
        out = {}
        for idx in combinations(range(self.algebra.dim), self.degree):
            out[self.label(idx)] = str(self.value(*idx))
        return out

    def __str__(self):
        if self.is_zero():
            return "0"
        return "; ".join(f"({self.label(k)}): {v}" for k, v in sorted(self.values.items()))

    def __repr__(self):
        return f"Cochain[{self.degree}]({self})"


def coboundary(alpha: Cochain) -> Cochain:
    """Standard Chevalley-Eilenberg differential for input degree <= 2.

    (d alpha)(x0..xn) = sum_i (-1)^i x_i . alpha(..^x_i..)
                        + sum_{i<j} (-1)^(i+j) alpha([x_i, x_j], ..^x_i..^x_j..)
    """
    n = alpha.degree
    if n > MAX_INPUT_DEGREE:
        raise UnsupportedDegree(f"coboundary of a degree-{n} cochain is not supported")
    action = alpha.action
    alg = action.algebra
    vals = {}
    for idx in combinations(range(alg.dim), n + 1):
        basis = [alg.basis(i) for i in idx]
        total = Poly.zero(action.chart)
        for i in range(n + 1):
            rest = idx[:i] + idx[i + 1:]
            v = alpha.value(*rest)
            if v:
                term = action.module_action(basis[i], v)
                total = total + term if i % 2 == 0 else total - term
        for i, j in combinations(range(n + 1), 2):
            br = alg.bracket(basis[i], basis[j])
            if not any(br):
                continue
            others = [basis[k] for k in range(n + 1) if k not in (i, j)]
            term = alpha(br, *others)
            total = total + term if (i + j) % 2 == 0 else total - term
        vals[idx] = total
    return Cochain(action, n + 1, vals)


@dataclass(frozen=True)
class CocycleCheck:
    is_cocycle: bool
    witness: tuple | None = None
    value: Poly | None = None

    def __bool__(self):
        return self.is_cocycle


def is_cocycle(alpha: Cochain) -> CocycleCheck:
    d = coboundary(alpha)
    for idx in sorted(d.values):
        return CocycleCheck(False, idx, d.values[idx])
    return CocycleCheck(True)


def canonical_cocycle(omega: KForm, action: ActionMap) -> Cochain:
    """Omega(a, b) = omega(X_a, X_b); requires d omega = 0."""
    if omega.degree != 2:
        raise ValueError("canonical cocycle needs a 2-form")
    if omega.chart != action.chart:
        raise ChartMismatch("form and action live on different charts")
    if not exterior_derivative(omega).is_zero():
        raise NotClosed("omega is not closed")
    gens = action.generators
    return Cochain.from_function(action, 2, lambda i, j: omega(gens[i], gens[j]))


def _monomials(nvars: int, bound: int):
    def rec(i, left):
        if i == nvars:
            yield ()
            return
        for k in range(left + 1):
            for rest in rec(i + 1, left - k):
                yield (k,) + rest

    return sorted(rec(0, bound), key=lambda e: (sum(e), tuple(-x for x in e)))


@dataclass
class Triviality:
    """Result of searching for beta with d beta = alpha among polynomials of
    bounded degree. ``certificate`` (when beta is None) maps equation labels to
    multipliers y with y . M = 0 and y . rhs = 1."""

    alpha: Cochain
    degree_bound: int
    beta: Cochain | None
    certificate: dict[str, Fraction] | None = None
    unknowns: int = 0
    equations: int = 0
    rows: list = field(default_factory=list, repr=False)
    rhs: list = field(default_factory=list, repr=False)
    multipliers: list = field(default_factory=list, repr=False)

    @property
    def trivial(self) -> bool:
        return self.beta is not None

    def verify(self) -> bool:
        """Independent re-check of whichever answer was produced."""
        if self.beta is not None:
            return coboundary(self.beta) == self.alpha
        y = dict(enumerate(self.multipliers))
        combo: dict = {}
        for i, row in enumerate(self.rows):
            if y.get(i):
                for k, v in row.items():
                    combo[k] = combo.get(k, 0) + y[i] * v
        return not any(combo.values()) and sum(y[i] * self.rhs[i] for i in y) == 1


def solve_coboundary(alpha: Cochain, degree_bound: int | None = None) -> Triviality:
    n = alpha.degree
    if n < 1:
        raise UnsupportedDegree("a 0-cochain is never a coboundary")
    if n > MAX_INPUT_DEGREE + 1:
        raise UnsupportedDegree(f"degree {n}")
    if degree_bound is None:
        degree_bound = max(alpha.max_degree(), 0) + 2
    action = alpha.action
    chart = action.chart
    slots = list(combinations(range(action.algebra.dim), n - 1))
    monos = _monomials(chart.dimension, degree_bound)
    columns = []
    row_index: dict = {}
    for slot in slots:
        for m in monos:
            elem = Cochain(action, n - 1, {slot: Poly.monomial(chart, m)})
            d = coboundary(elem)
            col = {}
            for idx, val in d.values.items():
                for e, c in val.terms.items():
                    key = (idx, e)
                    col[row_index.setdefault(key, len(row_index))] = c
            columns.append((slot, m, col))
    for idx, val in alpha.values.items():
        for e in val.terms:
            row_index.setdefault((idx, e), len(row_index))
    rows = [dict() for _ in row_index]
    for j, (_, _, col) in enumerate(columns):
        for r, c in col.items():
            rows[r][j] = c
    rhs = [Fraction(0)] * len(row_index)
    for (idx, e), r in row_index.items():
        v = alpha.values.get(idx)
        if v is not None:
            rhs[r] = v.terms.get(e, Fraction(0))
    sol = solve_rational(rows, rhs, len(columns))
    labels = {r: f"({alpha.label(idx)}) {Poly.monomial(chart, e)}" for (idx, e), r in row_index.items()}
    if sol.feasible:
        vals: dict = {}
        for (slot, m, _), x in zip(columns, sol.solution):
            if x:
                vals[slot] = vals.get(slot, Poly.zero(chart)) + Poly.monomial(chart, m, x)
        beta = Cochain(action, n - 1, vals)
        return Triviality(alpha, degree_bound, beta, None, len(columns), len(rows), rows, rhs)
    cert = {labels[r]: v for r, v in sorted(sol.certificate.items())}
    ys = [sol.certificate.get(i, Fraction(0)) for i in range(len(rows))]
    return Triviality(alpha, degree_bound, None, cert, len(columns), len(rows), rows, rhs, ys)


def coboundary_solve(alpha: Cochain, degree_bound: int | None = None) -> Cochain | None:
    """beta with d beta = alpha and polynomial degree <= bound, or None."""
    return solve_coboundary(alpha, degree_bound).beta


def cohomologous(alpha1: Cochain, alpha2: Cochain, degree_bound: int | None = None) -> Cochain | None:
    """Witness beta with alpha1 - alpha2 = d beta, or None within the bound."""
    alpha1._check(alpha2)
    return coboundary_solve(alpha1 - alpha2, degree_bound)


@dataclass(frozen=True)
class ExtensionElement:
    """Pair (a, f) in Lie(G) x C^inf(M)."""

    a: tuple
    f: Poly


def modified_bracket(alpha: Cochain, x: ExtensionElement, y: ExtensionElement) -> ExtensionElement:
    """[(a, f), (b, g)]_alpha = ([a, b], a.g - b.f + alpha(a, b))."""
    if alpha.degree != 2:
        raise ValueError("modified bracket needs a 2-cochain")
    act = alpha.action
    ab = act.algebra.bracket(x.a, y.a)
    f = act.module_action(x.a, y.f) - act.module_action(y.a, x.f) + alpha(x.a, y.a)
    return ExtensionElement(ab, f)


def jacobi_defect(alpha: Cochain, x: ExtensionElement, y: ExtensionElement, z: ExtensionElement) -> Poly:
    """Function part of the cyclic sum [[x,y],z] + [[y,z],x] + [[z,x],y]."""
    br = lambda u, v: modified_bracket(alpha, u, v)  # noqa: E731
    terms = [br(br(x, y), z), br(br(y, z), x), br(br(z, x), y)]
    return terms[0].f + terms[1].f + terms[2].f


def basis_element(alpha_or_action, i: int) -> ExtensionElement:
    action = alpha_or_action.action if isinstance(alpha_or_action, Cochain) else alpha_or_action
    return ExtensionElement(action.algebra.basis(i), Poly.zero(action.chart))


def shift_by(beta: Cochain):
    """The map (a, f) -> (a, f + beta(a)) attached to a 1-cochain."""
    if beta.degree != 1:
        raise ValueError("shift needs a 1-cochain")
    return lambda x: ExtensionElement(x.a, x.f + beta(x.a))
