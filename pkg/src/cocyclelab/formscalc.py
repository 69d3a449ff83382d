"""Cartan calculus on a single polynomial chart.

Vector fields and differential forms carry one coefficient per component;
coefficients are :class:`Poly` (or :class:`RatFunc` for Hamiltonian fields of
forms with a non-constant determinant). Conventions:

* ``(dx^i ^ dx^j)(X, Y) = X^i Y^j - X^j Y^i`` and ``alpha(X1, ..., Xk)`` is
  ``i_{Xk} ... i_{X1} alpha``.
* A 2-form is encoded as the antisymmetric matrix ``A[i][j]`` = coefficient of
  ``dx^i ^ dx^j`` for ``i < j``.
* Hamiltonian fields solve ``i_{X_f} omega = df``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import (
    ChartMismatch,
    DegreeTooLow,
    DimensionMismatch,
    NonConstantDeterminant,
    SingularForm,
)
from .exactalg import Chart, Poly, RatFunc, poly_det, ratfunc_solve, simplify


class SignConvention(enum.Enum):
    """Orientation of the Poisson bracket relative to ``omega``.

    ``A``: ``{f, g} = omega(X_f, X_g) = X_g(f)``, the literal reading.
    ``B``: ``{f, g} = omega(X_g, X_f) = X_f(g)``, the opposite orientation.
    """

    A = "paper-A"
    B = "paper-B"

    @property
    def sign(self) -> int:
        return 1 if self is SignConvention.A else -1

    @classmethod
    def parse(cls, text) -> SignConvention:
        if isinstance(text, SignConvention):
            return text
        t = str(text).strip()
        for c in cls:
            if t in (c.value, c.name, c.name.lower()):
                return c
        raise ValueError(f"unknown sign convention {text!r} (use A or B)")


def _same_chart(a: Chart, b: Chart):
    if a is not b and a != b:
        raise ChartMismatch(f"{a!r} vs {b!r}")


def _zero(chart):
    return Poly.zero(chart)


def _coerce_coeff(chart, c):
    if isinstance(c, (int, Fraction)):
        return Poly.constant(chart, c)
    if isinstance(c, (Poly, RatFunc)):
        _same_chart(c.chart, chart)
        return c
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


class VectorField:
    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Sequence):
        if len(components) != chart.dimension:
            raise DimensionMismatch(
                f"{len(components)} components on a {chart.dimension}-dimensional chart"
            )
        self.chart = chart
        self.components = tuple(_coerce_coeff(chart, c) for c in components)

    @classmethod
    def zero(cls, chart: Chart) -> VectorField:
        return cls(chart, [_zero(chart)] * chart.dimension)

    @classmethod
    def partial(cls, chart: Chart, name) -> VectorField:
        i = chart.index(name)
        return cls(chart, [Poly.constant(chart, 1 if k == i else 0) for k in range(chart.dimension)])

    @classmethod
    def from_dict(cls, chart: Chart, comps: Mapping[str, object]) -> VectorField:
        out = [_zero(chart)] * chart.dimension
        for name, c in comps.items():
            out[chart.index(name)] = _coerce_coeff(chart, c)
        return cls(chart, out)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __bool__(self):
        return not self.is_zero()

    def __call__(self, f):
        """Directional derivative X(f)."""
        f = _coerce_coeff(self.chart, f)
        total = _zero(self.chart)
        for i, c in enumerate(self.components):
            if c:
                d = f.diff(i)
                if d:
                    total = total + c * d
        return simplify(total)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        _same_chart(self.chart, other.chart)
        return VectorField(self.chart, [simplify(a + b) for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField(self.chart, [-c for c in self.components])

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, (VectorField, KForm)):
            return NotImplemented
        c = _coerce_coeff(self.chart, c)
        return VectorField(self.chart, [simplify(c * x) for x in self.components])

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self * (1 / Fraction(c))
        if isinstance(c, Poly) and c.is_constant() and c:
            return self * (1 / c.constant_value())
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and all(
            a == b for a, b in zip(self.components, other.components)
        )

    def __hash__(self):
        return hash((self.chart, self.components))

    def support(self) -> tuple[str, ...]:
        return tuple(n for n, c in zip(self.chart.names, self.components) if c)

    def __str__(self):
        parts = []
        for name, c in zip(self.chart.names, self.components):
            if not c:
                continue
            s = str(c)
            if s in ("1", "-1"):
                parts.append(s[:-1] + f"d/d{name}")
            elif isinstance(c, Poly) and len(c.terms) == 1:
                parts.append(f"{s}*d/d{name}")
            else:
                parts.append(f"({s})*d/d{name}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"VectorField({self})"


class KForm:
    """Differential k-form: ``{(i1 < ... < ik): coefficient}``, zeros dropped."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple, object] | None = None):
        if not 0 <= degree:
            raise ValueError("negative form degree")
        self.chart = chart
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {degree}")
            if idx and not 0 <= idx[-1] < chart.dimension:
                raise DimensionMismatch(f"index {idx} out of range")
            c = _coerce_coeff(chart, c)
            if c:
                clean[idx] = simplify(c)
        self.coeffs = clean

    @classmethod
    def _from_unsorted(cls, chart, degree, items) -> KForm:
        acc: dict = {}
        for idx, c in items:
            if len(set(idx)) != len(idx):
                continue
            perm = sorted(range(len(idx)), key=lambda k: idx[k])
            sign = _perm_sign(perm)
            key = tuple(sorted(idx))
            c = c if sign > 0 else -c
            acc[key] = acc[key] + c if key in acc else c
        return cls(chart, degree, acc)

    @classmethod
    def function(cls, f) -> KForm:
        return cls(f.chart, 0, {(): f})

    @classmethod
    def d(cls, chart: Chart, name) -> KForm:
        return cls(chart, 1, {(chart.index(name),): 1})

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> KForm:
        return cls(chart, degree, {})

    @classmethod
    def from_matrix(cls, chart: Chart, A: Sequence[Sequence]) -> KForm:
        n = chart.dimension
        return cls(chart, 2, {(i, j): A[i][j] for i in range(n) for j in range(i + 1, n)})

    def matrix(self) -> list[list]:
        if self.degree != 2:
            raise ValueError("matrix encoding is for 2-forms")
        n = self.chart.dimension
        A = [[_zero(self.chart) for _ in range(n)] for _ in range(n)]
        for (i, j), c in self.coeffs.items():
            A[i][j] = c
            A[j][i] = -c
        return A

    def function_value(self):
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.coeffs.get((), _zero(self.chart))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        _same_chart(self.chart, other.chart)
        if self.degree != other.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = acc[k] + c if k in acc else c
        return KForm(self.chart, self.degree, acc)

    def __neg__(self):
        return KForm(self.chart, self.degree, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, (VectorField, KForm)):
            return NotImplemented
        c = _coerce_coeff(self.chart, c)
        return KForm(self.chart, self.degree, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self * (1 / Fraction(c))
        if isinstance(c, Poly) and c.is_constant() and c:
            return self * (1 / c.constant_value())
        return NotImplemented

    def __xor__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return wedge(self, other)

    def __call__(self, *vectors):
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vectors")
        out = self
        for X in vectors:
            out = interior_product(X, out)
        return out.function_value()

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.degree == other.degree
            and self.coeffs.keys() == other.coeffs.keys()
            and all(self.coeffs[k] == other.coeffs[k] for k in self.coeffs)
        )

    def __hash__(self):
        return hash((self.chart, self.degree, frozenset(self.coeffs)))

    def __str__(self):
        if self.degree == 0:
            return str(self.function_value())
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            basis = "^".join("d" + self.chart.names[i] for i in idx)
            s = str(c)
            if s == "1":
                parts.append(basis)
            elif s == "-1":
                parts.append("-" + basis)
            elif isinstance(c, Poly) and len(c.terms) == 1:
                parts.append(f"{s}*{basis}")
            else:
                parts.append(f"({s})*{basis}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"KForm[{self.degree}]({self})"


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map source -> target; one component per target variable."""

    source: Chart
    target: Chart
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.target.dimension:
            raise DimensionMismatch("one component per target variable required")
        for c in self.components:
            _same_chart(c.chart, self.source)

    @classmethod
    def identity(cls, chart: Chart) -> PolyMap:
        return cls(chart, chart, tuple(Poly.var(chart, n) for n in chart.names))

    def __call__(self, f: Poly) -> Poly:
        """Pull a function back: f o phi."""
        _same_chart(f.chart, self.target)
        return f.compose(self.components, self.source)


# operations


def wedge(alpha: KForm, beta: KForm) -> KForm:
    _same_chart(alpha.chart, beta.chart)
    k = alpha.degree + beta.degree
    if k > alpha.chart.dimension:
        return KForm.zero(alpha.chart, k)
    items = []
    for I, a in alpha.coeffs.items():
        for J, b in beta.coeffs.items():
            if set(I) & set(J):
                continue
            items.append((I + J, a * b))
    return KForm._from_unsorted(alpha.chart, k, items)


def exterior_derivative(alpha: KForm) -> KForm:
    chart = alpha.chart
    k = alpha.degree + 1
    if k > chart.dimension:
        return KForm.zero(chart, k)
    items = []
    for I, c in alpha.coeffs.items():
        for j in range(chart.dimension):
            if j in I:
                continue
            dc = c.diff(j)
            if dc:
                items.append(((j,) + I, dc))
    return KForm._from_unsorted(chart, k, items)


def interior_product(X: VectorField, alpha: KForm) -> KForm:
    _same_chart(X.chart, alpha.chart)
    if alpha.degree < 1:
        raise DegreeTooLow("interior product of a 0-form is undefined")
    acc: dict = {}
    for I, c in alpha.coeffs.items():
        for r, i in enumerate(I):
            x = X.components[i]
            if not x:
                continue
            key = I[:r] + I[r + 1:]
            term = x * c if r % 2 == 0 else -(x * c)
            acc[key] = acc[key] + term if key in acc else term
    return KForm(alpha.chart, alpha.degree - 1, acc)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^i = X(Y^i) - Y(X^i)."""
    _same_chart(X.chart, Y.chart)
    return VectorField(
        X.chart, [simplify(X(yi) - Y(xi)) for xi, yi in zip(X.components, Y.components)]
    )


def lie_derivative(X: VectorField, alpha: KForm) -> KForm:
    """Cartan's formula L_X = i_X d + d i_X (on functions: X(f))."""
    _same_chart(X.chart, alpha.chart)
    if alpha.degree == 0:
        return KForm.function(X(alpha.function_value()))
    return interior_product(X, exterior_derivative(alpha)) + exterior_derivative(
        interior_product(X, alpha)
    )


def pullback(phi: PolyMap, alpha: KForm) -> KForm:
    _same_chart(alpha.chart, phi.target)
    src = phi.source
    dphi = [exterior_derivative(KForm.function(c)) for c in phi.components]
    out = KForm.zero(src, alpha.degree)
    for I, c in alpha.coeffs.items():
        term = KForm.function(phi(c))
        for i in I:
            term = wedge(term, dphi[i])
        out = out + term
    return out


def df(f) -> KForm:
    return exterior_derivative(KForm.function(f))


def form_determinant(omega: KForm) -> Poly:
    return poly_det(omega.matrix())


def hamiltonian_field(omega: KForm, f) -> VectorField:
    """X_f with i_{X_f} omega = df.

    In matrix form (i_X omega)_j = sum_i X^i A[i][j], so X solves A^T X = df.
    """
    if omega.degree != 2:
        raise ValueError("hamiltonian_field needs a 2-form")
    chart = omega.chart
    f = _coerce_coeff(chart, f)
    A = omega.matrix()
    n = chart.dimension
    det = poly_det(A)
    if not det:
        raise SingularForm("2-form is degenerate (determinant is identically zero)")
    if not det.is_constant():
        warnings.warn(
            f"determinant {det} is not constant; result valid where it is nonzero",
            NonConstantDeterminant,
            stacklevel=2,
        )
    At = [[A[j][i] for j in range(n)] for i in range(n)]
    if isinstance(f, Poly):
        return VectorField(chart, ratfunc_solve(At, [f.diff(i) for i in range(n)]))
    # rational f: X = (A^T)^{-1} df, inverse assembled column by column
    grad = [f.diff(i) for i in range(n)]
    cols = [ratfunc_solve(At, [Poly.constant(chart, 1 if k == j else 0) for k in range(n)]) for j in range(n)]
    comps = []
    for i in range(n):
        acc = RatFunc(Poly.zero(chart))
        for j in range(n):
            if cols[j][i] and grad[j]:
                acc = acc + cols[j][i] * grad[j]
        comps.append(simplify(acc))
    return VectorField(chart, comps)


def poisson_bracket(omega: KForm, f, g, convention=SignConvention.A):
    """{f, g}: omega(X_f, X_g) under convention A, omega(X_g, X_f) under B."""
    convention = SignConvention.parse(convention)
    Xf = hamiltonian_field(omega, f)
    Xg = hamiltonian_field(omega, g)
    val = omega(Xf, Xg)
    return simplify(val if convention is SignConvention.A else -val)


def canonical_form(chart: Chart, pairs: Sequence[tuple[str, str]]) -> KForm:
    """sum over (q, p) of dq ^ dp."""
    out = KForm.zero(chart, 2)
    for q, p in pairs:
        out = out + wedge(KForm.d(chart, q), KForm.d(chart, p))
    return out


def is_closed(alpha: KForm) -> bool:
    return exterior_derivative(alpha).is_zero()


def basis_index_sets(n: int, k: int):
    return list(combinations(range(n), k))
