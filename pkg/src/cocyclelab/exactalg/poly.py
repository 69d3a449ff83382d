"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial lives on a :class:`Chart`, an ordered tuple of variables. Terms
are stored as ``{exponent tuple: Fraction}`` with zero coefficients never
kept, so two polynomials over the same chart are equal iff their term maps
are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from ..errors import ChartMismatch, DimensionMismatch, UnknownVariable

KINDS = ("coordinate", "velocity", "momentum", "generic")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "generic"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")


class Chart:
    """Ordered coordinate system; fixes the variable order of every Poly on it."""

    __slots__ = ("variables", "names", "_index")

    def __init__(self, variables: Iterable[Variable | str]):
        vs = tuple(v if isinstance(v, Variable) else Variable(v) for v in variables)
        names = tuple(v.name for v in vs)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.variables = vs
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def dimension(self) -> int:
        return len(self.names)

    def index(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.names):
                raise UnknownVariable(name)
            return name
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def kind(self, name: str) -> str:
        return self.variables[self.index(name)].kind

    def names_of_kind(self, kind: str) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.kind == kind)

    def __eq__(self, other):
        return isinstance(other, Chart) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self):
        return f"Chart({', '.join(self.names)})"


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _grlex_key(exp):
    return (sum(exp), exp)


class Poly:
    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[tuple, Fraction] | None = None):
        self.chart = chart
        clean = {}
        if terms:
            n = chart.dimension
            for exp, c in terms.items():
                if len(exp) != n:
                    raise DimensionMismatch(f"exponent {exp} on a {n}-variable chart")
                if c:
                    clean[tuple(exp)] = as_fraction(c)
        self.terms = clean

    @classmethod
    def _raw(cls, chart, terms):
        # terms already canonical: no zeros, Fraction coefficients
        p = object.__new__(cls)
        p.chart = chart
        p.terms = terms
        return p

    # construction

    @classmethod
    def zero(cls, chart: Chart) -> Poly:
        return cls._raw(chart, {})

    @classmethod
    def constant(cls, chart: Chart, value) -> Poly:
        value = as_fraction(value)
        if not value:
            return cls.zero(chart)
        return cls._raw(chart, {(0,) * chart.dimension: value})

    @classmethod
    def var(cls, chart: Chart, name: str | int) -> Poly:
        i = chart.index(name)
        exp = [0] * chart.dimension
        exp[i] = 1
        return cls._raw(chart, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, chart: Chart, exp: Sequence[int], coeff=1) -> Poly:
        return cls(chart, {tuple(exp): as_fraction(coeff)})

    # predicates and accessors

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        """Value of the degree-0 term."""
        return self.terms.get((0,) * self.chart.dimension, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var) -> int:
        i = self.chart.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def variables_used(self) -> set[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return used

    def leading_term(self) -> tuple[tuple, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ChartMismatch(f"{self.chart!r} vs {other.chart!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly._raw(self.chart, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.chart, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero(self.chart)
            return Poly._raw(self.chart, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly._raw(self.chart, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, Poly) and other.is_constant() and other:
            return self * (1 / other.constant_value())
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponents must be non-negative integers")
        result = Poly.constant(self.chart, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.chart == other.chart and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.constant(self.chart, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    # calculus and evaluation

    def diff(self, var: str | int) -> Poly:
        i = self.chart.index(var)
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                terms[ne] = c * k
        return Poly._raw(self.chart, terms)

    def _point(self, point) -> list:
        if isinstance(point, Mapping):
            vals = [0] * self.chart.dimension
            for name, v in point.items():
                vals[self.chart.index(name)] = v
            return vals
        point = list(point)
        if len(point) != self.chart.dimension:
            raise DimensionMismatch(
                f"point has {len(point)} entries, chart has {self.chart.dimension}"
            )
        return point

    def evaluate(self, point) -> Fraction:
        vals = [as_fraction(v) for v in self._point(point)]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t *= v ** k
            total += t
        return total

    def evaluate_float(self, point) -> float:
        vals = [float(v) for v in self._point(point)]
        total = 0.0
        for e, c in self.terms.items():
            t = float(c)
            for v, k in zip(vals, e):
                if k:
                    t *= v ** k
            total += t
        return total

    def compose(self, images: Sequence[Poly], target: Chart | None = None) -> Poly:
        """Substitute variable i by ``images[i]`` (all on ``target``)."""
        if len(images) != self.chart.dimension:
            raise DimensionMismatch("one image per variable required")
        if target is None:
            target = images[0].chart if images else self.chart
        powers: dict = {}
        result = Poly.zero(target)
        for e, c in self.terms.items():
            t = Poly.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    t = t * powers[key]
            result = result + t
        return result

    def rechart(self, target: Chart) -> Poly:
        """The same polynomial viewed on a chart that contains all used variables."""
        idx = []
        for i, name in enumerate(self.chart.names):
            idx.append(target.index(name) if name in target else None)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * target.dimension
            for i, k in enumerate(e):
                if k:
                    if idx[i] is None:
                        raise UnknownVariable(self.chart.names[i])
                    ne[idx[i]] = k
            terms[tuple(ne)] = c
        return Poly._raw(target, terms)

    def coefficients_in(self, var) -> dict[int, Poly]:
        """Split as a univariate polynomial in ``var`` with coefficients free of it."""
        i = self.chart.index(var)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            out.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: Poly._raw(self.chart, t) for k, t in out.items()}

    def divexact(self, other: Poly) -> Poly:
        """Quotient of an exact division; ArithmeticError if ``other`` does not divide."""
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant():
            return self * (1 / other.constant_value())
        lexp, lc = other.leading_term()
        quotient: dict = {}
        rem = self
        while rem:
            e, c = rem.leading_term()
            d = tuple(a - b for a, b in zip(e, lexp))
            if min(d) < 0:
                raise ArithmeticError(f"{other} does not divide {self}")
            q = c / lc
            quotient[d] = q
            rem = rem - Poly._raw(self.chart, {d: q}) * other
        return Poly._raw(self.chart, quotient)

    # rendering

    def _monomial_str(self, exp) -> str:
        parts = []
        for name, k in zip(self.chart.names, exp):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(e)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"Poly({self})"


def variables(chart: Chart) -> tuple[Poly, ...]:
    """All coordinate functions of ``chart`` as polynomials, in chart order."""
    return tuple(Poly.var(chart, n) for n in chart.names)
