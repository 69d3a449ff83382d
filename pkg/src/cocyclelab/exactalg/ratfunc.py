"""Reduced rational functions over a chart, plus the multivariate GCD they need."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import ChartMismatch
from .poly import Poly


def monic(p: Poly) -> Poly:
    if not p:
        return p
    return p * (1 / p.leading_coefficient())


def _integer_primitive(p: Poly) -> Poly:
    """Scale p to integer coefficients with no common factor (sign kept)."""
    if not p:
        return p
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    num = 0
    for c in p.terms.values():
        num = gcd(num, c.numerator * (den // c.denominator))
    return p * Fraction(den, num)


def _content(p: Poly, var: int) -> Poly:
    g = None
    for c in p.coefficients_in(var).values():
        g = c if g is None else poly_gcd(g, c)
        if g.is_constant():
            break
    return g


def _pseudo_rem(a: Poly, b: Poly, var: int) -> Poly:
    db = b.degree_in(var)
    lb = b.coefficients_in(var)[db]
    x = Poly.var(a.chart, var)
    r = a
    while r and r.degree_in(var) >= db:
        dr = r.degree_in(var)
        lr = r.coefficients_in(var)[dr]
        r = lb * r - lr * x ** (dr - db) * b
    return r


_PROBES = (3, -2, 5, 7, -11, 13, 4, -17, 19, 23)
_PRIME = 2_147_483_647


def _specialize_mod(p: Poly, var: int, values: list[int]) -> dict[int, int] | None:
    """Univariate image in ``var`` mod a prime after substituting the other
    variables; None if a coefficient denominator vanishes mod the prime."""
    out: dict[int, int] = {}
    for e, c in p.terms.items():
        if c.denominator % _PRIME == 0:
            return None
        v = c.numerator * pow(c.denominator, -1, _PRIME)
        for i, k in enumerate(e):
            if k and i != var:
                v = v * pow(values[i], k, _PRIME)
        out[e[var]] = (out.get(e[var], 0) + v) % _PRIME
    return {k: v for k, v in out.items() if v}


def _uni_gcd_degree_mod(f: dict[int, int], g: dict[int, int]) -> int:
    """Degree of gcd over GF(p) of two polynomials given as {deg: coeff}."""
    while g:
        dg = max(g)
        inv = pow(g[dg], -1, _PRIME)
        f = dict(f)
        while f and max(f) >= dg:
            df = max(f)
            q = f[df] * inv % _PRIME
            for k, c in g.items():
                key = k + df - dg
                nv = (f.get(key, 0) - q * c) % _PRIME
                if nv:
                    f[key] = nv
                else:
                    f.pop(key, None)
        f, g = g, f
    return max(f) if f else -1


def _coprime_in(a: Poly, b: Poly, var: int) -> bool:
    """True when a modular specialisation proves gcd(a, b) is free of ``var``.

    Substituting constants for the other variables and reducing mod a prime
    cannot lower the degree of the gcd in ``var`` while both leading
    coefficients survive, so a constant image gcd is a proof. False means
    "unknown", never "not coprime"."""
    n = a.chart.dimension
    da, db = a.degree_in(var), b.degree_in(var)
    for shift in range(len(_PROBES)):
        values = [_PROBES[(i + shift) % len(_PROBES)] % _PRIME for i in range(n)]
        fa, fb = _specialize_mod(a, var, values), _specialize_mod(b, var, values)
        if fa is None or fb is None:
            continue
        if (max(fa) if fa else -1) != da or (max(fb) if fb else -1) != db:
            continue
        return _uni_gcd_degree_mod(fa, fb) == 0
    return False


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (recursive primitive remainder sequence)."""
    if a.chart != b.chart:
        raise ChartMismatch(f"{a.chart!r} vs {b.chart!r}")
    if not a:
        return monic(b)
    if not b:
        return monic(a)
    if a.is_constant() or b.is_constant():
        return Poly.constant(a.chart, 1)
    ua, ub = a.variables_used(), b.variables_used()
    var = max(ua | ub)
    if var not in ub:
        return poly_gcd(_content(a, var), b)
    if var not in ua:
        return poly_gcd(a, _content(b, var))
    ca, cb = _content(a, var), _content(b, var)
    c = poly_gcd(ca, cb)
    if _coprime_in(a, b, var):
        return monic(c)
    pa, pb = _integer_primitive(a.divexact(ca)), _integer_primitive(b.divexact(cb))
    if pa.degree_in(var) < pb.degree_in(var):
        pa, pb = pb, pa
    while pb:
        r = _pseudo_rem(pa, pb, var)
        pa, pb = pb, (_integer_primitive(r.divexact(_content(r, var))) if r else r)
    if pa.degree_in(var) <= 0:
        return monic(c)
    return monic(c * pa.divexact(_content(pa, var)))


class RatFunc:
    """num/den with gcd(num, den) = 1 and den monic under graded-lex order."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, reduce: bool = True):
        if den is None:
            den = Poly.constant(num.chart, 1)
        if num.chart != den.chart:
            raise ChartMismatch(f"{num.chart!r} vs {den.chart!r}")
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            if not num:
                den = Poly.constant(num.chart, 1)
            else:
                g = poly_gcd(num, den)
                if not g.is_constant():
                    num, den = num.divexact(g), den.divexact(g)
            lc = den.leading_coefficient()
            if lc != 1:
                num, den = num * (1 / lc), den * (1 / lc)
        self.num = num
        self.den = den

    @property
    def chart(self):
        return self.num.chart

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other, reduce=False)
        if isinstance(other, (int, Fraction)):
            return RatFunc(Poly.constant(self.chart, other), reduce=False)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num * (1 / self.den.constant_value())

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

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
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc(self.den ** -n, self.num ** -n)
        return RatFunc(self.num ** n, self.den ** n, reduce=False)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.den.is_constant() or not self.den.is_constant():
            return self.num == other.num and self.den == other.den
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        if self.den.is_constant():
            return hash(self.as_poly())
        return hash((self.num, self.den))

    def diff(self, var) -> RatFunc:
        return RatFunc(
            self.num.diff(var) * self.den - self.num * self.den.diff(var), self.den * self.den
        )

    def evaluate(self, point) -> Fraction:
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError(f"denominator vanishes at {point}")
        return self.num.evaluate(point) / d

    def evaluate_float(self, point) -> float:
        return self.num.evaluate_float(point) / self.den.evaluate_float(point)

    def degree(self) -> int:
        return self.num.degree() if self.is_polynomial() else max(self.num.degree(), self.den.degree())

    def __str__(self):
        if self.den.is_constant():
            return str(self.as_poly())
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"


def simplify(x):
    """Demote a RatFunc with constant denominator to a Poly."""
    if isinstance(x, RatFunc) and x.is_polynomial():
        return x.as_poly()
    return x
