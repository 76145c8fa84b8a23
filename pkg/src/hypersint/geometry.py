"""Coordinate charts of the upper hyperboloid sheet and so(2,1) machinery.

The surface is w0^2 - w1^2 - w2^2 = 1 with w0 >= 1.  Three Killing
generators act on ambient functions:

    K3 = w0 d/dw1 + w1 d/dw0        (boost in the (w0, w1) plane)
    K2 = w0 d/dw2 + w2 d/dw0        (boost in the (w0, w2) plane)
    M1 = w1 d/dw2 - w2 d/dw1        (rotation in the (w1, w2) plane)

with [K3, K2] = M1, [K2, M1] = -K3, [K3, M1] = K2, and the Laplace-Beltrami
operator is K3^2 + K2^2 - M1^2.

Derivatives are taken numerically: a generator is applied as a central
difference of the function along the generator's *exact* one-parameter
flow (optionally Richardson-extrapolated), so evaluation points never
leave the surface.  Products of up to three generators are applied as
nested differences.

Charts (names used throughout the package and on the CLI):

    equidistant          (t1, t2):  w = (ch t1 ch t2, ch t1 sh t2, sh t1)
    horicyclic           (x, y), y > 0:
                         w = ((x^2+y^2+1)/2y, (x^2+y^2-1)/2y, x/y)
    elliptic-parabolic   (a, th), a > 0, |th| < pi/2
    hyperbolic-parabolic (b, th), b > 0, 0 < th < pi/2
    semi-hyperbolic      (mu, nu) with parameters (a_c, b_c, e3),
                         nu < e3 < mu; built on the complexified sphere,
                         see chart_to_ambient for the sign conventions.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (
    NonFiniteValueError,
    OutOfDomainError,
    SingularConfigurationError,
)

__all__ = [
    "AmbientPoint",
    "ChartPoint",
    "OperatorExpr",
    "CHARTS",
    "GENERATORS",
    "ambient_to_chart",
    "apply_generator",
    "apply_operator",
    "chart_to_ambient",
    "generator_flow",
    "hyperboloid_residual",
    "laplace_beltrami",
]

CHARTS = (
    "equidistant",
    "horicyclic",
    "elliptic-parabolic",
    "hyperbolic-parabolic",
    "semi-hyperbolic",
)
GENERATORS = ("K2", "K3", "M1")

#: default differentiation step (one Richardson level on top)
DEFAULT_STEP = 1e-4


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientPoint:
    """A point on the upper sheet, validated on construction."""

    w0: float
    w1: float
    w2: float

    def __post_init__(self):
        r = abs(self.w0 * self.w0 - self.w1 * self.w1 - self.w2 * self.w2 - 1.0)
        if not (math.isfinite(r) and r <= 1e-12 * max(1.0, self.w0 * self.w0)):
            raise OutOfDomainError(
                f"point ({self.w0}, {self.w1}, {self.w2}) is off the surface "
                f"(residual {r:.3e})")
        if self.w0 < 1.0 - 1e-12:
            raise OutOfDomainError("lower sheet: w0 < 1")


def hyperboloid_residual(q: AmbientPoint) -> float:
    """|w0^2 - w1^2 - w2^2 - 1|."""
    return abs(q.w0 * q.w0 - q.w1 * q.w1 - q.w2 * q.w2 - 1.0)


@dataclass(frozen=True)
class ChartPoint:
    """Chart coordinates (u1, u2); semi-hyperbolic also needs chart_params.

    chart_params for the semi-hyperbolic chart is (a_c, b_c, e3): the
    elliptic-coordinate foci parameters e1 = conj(e2) = a_c + i b_c and the
    real e3.  They are never defaulted silently.
    """

    chart: str
    u1: float
    u2: float
    chart_params: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise OutOfDomainError(f"unknown chart {self.chart!r}")
        u1, u2 = self.u1, self.u2
        if not (math.isfinite(u1) and math.isfinite(u2)):
            raise OutOfDomainError("chart coordinates must be finite")
        if self.chart == "horicyclic" and not u2 > 0.0:
            raise OutOfDomainError("horicyclic chart needs y > 0")
        if self.chart == "elliptic-parabolic":
            if not (u1 > 0.0 and abs(u2) < math.pi / 2):
                raise OutOfDomainError(
                    "elliptic-parabolic chart needs a > 0, |theta| < pi/2")
        if self.chart == "hyperbolic-parabolic":
            if not (u1 > 0.0 and 0.0 < u2 < math.pi / 2):
                raise OutOfDomainError(
                    "hyperbolic-parabolic chart needs b > 0, 0 < theta < pi/2")
        if self.chart == "semi-hyperbolic":
            if self.chart_params is None:
                raise OutOfDomainError(
                    "semi-hyperbolic chart requires chart_params = (a_c, b_c, e3)")
            a_c, b_c, e3 = self.chart_params
            if b_c == 0.0:
                raise OutOfDomainError("semi-hyperbolic chart needs b_c != 0")
            if not self.u2 < e3 < self.u1:
                raise OutOfDomainError("semi-hyperbolic chart needs nu < e3 < mu")


# ---------------------------------------------------------------------------
# Chart maps
# ---------------------------------------------------------------------------

def chart_to_ambient(p: ChartPoint, w2_sign: int = +1) -> AmbientPoint:
    """Map chart coordinates to the ambient point.

    ``w2_sign`` selects the sheet for the semi-hyperbolic chart, where the
    coordinates determine only w2^2; it is ignored by the other charts.  For
    semi-hyperbolic points, w0 > 0 is enforced and the sign of w1 follows by
    continuity (principal square root of s1^2, whose real part never
    vanishes on the domain).
    """
    c = p.chart
    u1, u2 = p.u1, p.u2
    if c == "equidistant":
        return AmbientPoint(
            math.cosh(u1) * math.cosh(u2),
            math.cosh(u1) * math.sinh(u2),
            math.sinh(u1),
        )
    if c == "horicyclic":
        x, y = u1, u2
        return AmbientPoint(
            (x * x + y * y + 1.0) / (2.0 * y),
            (x * x + y * y - 1.0) / (2.0 * y),
            x / y,
        )
    if c == "elliptic-parabolic":
        a, th = u1, u2
        cc = math.cosh(a) * math.cos(th)
        return AmbientPoint(
            (math.cosh(a) ** 2 + math.cos(th) ** 2) / (2.0 * cc),
            (math.sinh(a) ** 2 - math.sin(th) ** 2) / (2.0 * cc),
            math.tanh(a) * math.tan(th),
        )
    if c == "hyperbolic-parabolic":
        b, th = u1, u2
        ss = math.sinh(b) * math.sin(th)
        return AmbientPoint(
            (math.cosh(b) ** 2 + math.cos(th) ** 2) / (2.0 * ss),
            (math.sinh(b) ** 2 - math.sin(th) ** 2) / (2.0 * ss),
            1.0 / (math.tanh(b) * math.tan(th)),
        )
    # semi-hyperbolic
    mu, nu = u1, u2
    a_c, b_c, e3 = p.chart_params
    e1 = complex(a_c, b_c)
    e2 = e1.conjugate()
    s1sq = (mu - e1) * (nu - e1) / ((e1 - e2) * (e1 - e3))
    s1 = cmath.sqrt(s1sq)  # Re s1sq > 0 on the domain, principal root is smooth
    w0 = math.sqrt(2.0) * s1.real
    w1 = math.sqrt(2.0) * s1.imag
    w2sq = (mu - e3) * (e3 - nu) / ((e3 - a_c) ** 2 + b_c ** 2)
    w2 = w2_sign * math.sqrt(w2sq)
    return AmbientPoint(w0, w1, w2)


def ambient_to_chart(q: AmbientPoint, chart: str) -> ChartPoint:
    """Invert a chart map (not available for semi-hyperbolic).

    Horicyclic inversion: y = 1/(w0 - w1), x = w2/(w0 - w1); note that
    w0 - w1 > 0 holds everywhere on the upper sheet.
    """
    d = q.w0 - q.w1  # > 0 on the upper sheet
    if chart == "equidistant":
        return ChartPoint("equidistant", math.asinh(q.w2), math.atanh(q.w1 / q.w0))
    if chart == "horicyclic":
        return ChartPoint("horicyclic", q.w2 / d, 1.0 / d)
    if chart == "elliptic-parabolic":
        # cosh^2 a and cos^2 th are the roots of t^2 - S t + P
        P = 1.0 / (d * d)
        S = 1.0 + (q.w0 + q.w1) / d
        disc = math.sqrt(max(S * S - 4.0 * P, 0.0))
        u = 0.5 * (S + disc)   # cosh^2 a >= 1
        v = 0.5 * (S - disc)   # cos^2 th <= 1
        a = math.acosh(max(math.sqrt(u), 1.0))
        th = math.acos(min(math.sqrt(max(v, 0.0)), 1.0))
        if q.w2 < 0.0:
            th = -th
        return ChartPoint("elliptic-parabolic", a, th)
    if chart == "hyperbolic-parabolic":
        if q.w2 <= 0.0:
            raise OutOfDomainError("hyperbolic-parabolic chart covers w2 > 0 only")
        P = 1.0 / (d * d)
        D = (q.w0 + q.w1) / d - 1.0
        u = 0.5 * (D + math.sqrt(D * D + 4.0 * P))  # sinh^2 b
        w = u - D                                    # sin^2 th
        return ChartPoint("hyperbolic-parabolic",
                          math.asinh(math.sqrt(u)),
                          math.asin(min(math.sqrt(max(w, 0.0)), 1.0)))
    raise OutOfDomainError(f"no inversion implemented for chart {chart!r}")


# ---------------------------------------------------------------------------
# Generator flows and numerical derivatives
# ---------------------------------------------------------------------------

def generator_flow(g: str, t: float, q: AmbientPoint) -> AmbientPoint:
    """Exact one-parameter subgroup action of generator g for time t."""
    if g == "K3":
        ch, sh = math.cosh(t), math.sinh(t)
        return AmbientPoint(q.w0 * ch + q.w1 * sh, q.w0 * sh + q.w1 * ch, q.w2)
    if g == "K2":
        ch, sh = math.cosh(t), math.sinh(t)
        return AmbientPoint(q.w0 * ch + q.w2 * sh, q.w1, q.w0 * sh + q.w2 * ch)
    if g == "M1":
        co, si = math.cos(t), math.sin(t)
        return AmbientPoint(q.w0, q.w1 * co - q.w2 * si, q.w1 * si + q.w2 * co)
    raise OutOfDomainError(f"unknown generator {g!r}")


def _central(g: str, f: Callable[[AmbientPoint], complex], q: AmbientPoint,
             h: float):
    vp = f(generator_flow(g, h, q))
    vm = f(generator_flow(g, -h, q))
    return (vp - vm) / (2.0 * h)


def apply_generator(g: str, f: Callable[[AmbientPoint], complex],
                    q: AmbientPoint, h: float = DEFAULT_STEP,
                    richardson: bool = True):
    """Derivative of f along generator g at q.

    Central difference along the exact flow: O(h^2), or O(h^4) with one
    Richardson level (default).
    """
    if not h > 0.0:
        raise OutOfDomainError("step h must be positive")
    d1 = _central(g, f, q, h)
    if not richardson:
        _check_finite(d1)
        return d1
    d2 = _central(g, f, q, h / 2.0)
    out = (4.0 * d2 - d1) / 3.0
    _check_finite(out)
    return out


def _check_finite(v):
    if not (math.isfinite(complex(v).real) and math.isfinite(complex(v).imag)):
        raise NonFiniteValueError("non-finite value in generator application")


# ---------------------------------------------------------------------------
# Operator expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorExpr:
    """Linear combination of generator words with ambient-function coefficients.

    terms         : sequence of (coefficient, word) where word is a tuple of
                    generator names, len(word) <= 3, applied right to left;
                    the coefficient is a number or a callable of AmbientPoint.
    constant_term : multiple of the identity added to the combination.
    guards        : callables of AmbientPoint whose smallness marks a
                    coefficient singularity; evaluation is refused when any
                    |guard(q)| < guard_tol.
    """

    terms: tuple
    constant_term: complex = 0.0
    guards: tuple = ()
    name: str = ""

    def __post_init__(self):
        for coeff, word in self.terms:
            if len(word) > 3:
                raise OutOfDomainError("operator words longer than 3 not supported")
            for g in word:
                if g not in GENERATORS:
                    raise OutOfDomainError(f"unknown generator {g!r} in word")


def _apply_word(word: Sequence[str], f, q: AmbientPoint, h: float,
                richardson: bool):
    if not word:
        return f(q)

    def inner(p: AmbientPoint):
        return _apply_word(word[1:], f, p, h, richardson)

    return apply_generator(word[0], inner, q, h=h, richardson=richardson)


def apply_operator(expr: OperatorExpr, f: Callable[[AmbientPoint], complex],
                   q: AmbientPoint, h: float = DEFAULT_STEP,
                   richardson: bool = True, guard_tol: float = 1e-8):
    """Apply an OperatorExpr to f at q numerically.

    Words are realized by nested central differences along exact flows
    (right-to-left), each optionally Richardson extrapolated.
    """
    for guard in expr.guards:
        if abs(guard(q)) < guard_tol:
            raise SingularConfigurationError(
                f"operator {expr.name or '<anon>'} singular at "
                f"({q.w0}, {q.w1}, {q.w2})")
    total = expr.constant_term * f(q) if expr.constant_term != 0.0 else 0.0
    for coeff, word in expr.terms:
        c = coeff(q) if callable(coeff) else coeff
        if c == 0.0:
            continue
        total = total + c * _apply_word(word, f, q, h, richardson)
    return total


def laplace_beltrami() -> OperatorExpr:
    """K3^2 + K2^2 - M1^2."""
    return OperatorExpr(
        terms=(
            (1.0, ("K3", "K3")),
            (1.0, ("K2", "K2")),
            (-1.0, ("M1", "M1")),
        ),
        name="laplace_beltrami",
    )
