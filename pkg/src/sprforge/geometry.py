"""The three planar conic regions attached to a Hurwitz sextic.

Each region lives on a 2-plane of (x, y, z, p)-space cut out by two of the
five g-coefficient functionals A..E and is bounded by a quadric of the form
L1**2 - 4*L2*L3:

    index 1: D = E = 0,  B**2 - 4*A*C
    index 2: A = E = 0,  C**2 - 4*B*D
    index 3: A = B = 0,  D**2 - 4*C*E

On each region g(t) is a monomial times a quadratic whose discriminant is
the quadric, so the open region is where g stays positive for t > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .poly_core import Polynomial, is_hurwitz
from .spr import CandidatePoint, _sextic_coeffs, g_functionals

NAMES = "ABCDE"

# planes, quadric (L1, L2, L3), pivot preference for the chart
_LAYOUT = {
    1: (("D", "E"), ("B", "A", "C"), ((2, 3), (1, 3), (1, 2))),
    2: (("A", "E"), ("C", "B", "D"), ((0, 3), (0, 2))),
    3: (("A", "B"), ("D", "C", "E"), ((0, 2), (0, 1))),
}

# the extra functional of each tangent line (first, second)
_TANGENT_EXTRA = {1: ("A", "C"), 2: ("B", "D"), 3: ("C", "E")}

RETRACTION = 1 - Fraction(1, 1024)


class NotHurwitzError(ValueError):
    pass


class DegenerateDenominatorError(ZeroDivisionError):
    def __init__(self, index: int, which: str, expression: str):
        super().__init__(f"index {index}, {which} tangency point: denominator {expression} vanishes")
        self.index = index
        self.which = which
        self.expression = expression


# ---------------------------------------------------------------------------
# small exact linear algebra


def solve_linear(M: Sequence[Sequence], rhs: Sequence) -> list:
    """Gauss-Jordan over the rationals; raises ZeroDivisionError if singular."""
    n = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def _apply(L, pt) -> Fraction:
    return L[0] * pt[0] + L[1] * pt[1] + L[2] * pt[2] + L[3] * pt[3] + L[4]


def functionals(a: Polynomial) -> dict:
    return dict(zip(NAMES, g_functionals(a)))


def _affine2(L, origin, d1, d2) -> tuple:
    """Restriction of a functional to the chart: (const, coeff_u1, coeff_u2)."""
    return (
        _apply(L, origin),
        sum(L[i] * d1[i] for i in range(4)),
        sum(L[i] * d2[i] for i in range(4)),
    )


def _mul2(f, g) -> tuple:
    # product of affine maps in (u1, u2): (uu, uv, vv, u, v, 1)
    return (
        f[1] * g[1],
        f[1] * g[2] + f[2] * g[1],
        f[2] * g[2],
        f[0] * g[1] + f[1] * g[0],
        f[0] * g[2] + f[2] * g[0],
        f[0] * g[0],
    )


@dataclass(frozen=True)
class ConicRegion:
    index: int
    planes: tuple  # two functionals, each (cx, cy, cz, cp, c0)
    quadric: tuple  # (L1, L2, L3): value L1**2 - 4*L2*L3
    free: tuple  # coordinate indices used as chart parameters
    origin: tuple
    directions: tuple
    conic: tuple  # (a, b, c, d, e, f) of a u^2 + b uv + c v^2 + d u + e v + f
    anchor: tuple = ()  # chart coordinates of a known point on the curve

    def quadric_value(self, pt) -> Fraction:
        L1, L2, L3 = self.quadric
        return _apply(L1, pt) ** 2 - 4 * _apply(L2, pt) * _apply(L3, pt)

    def plane_residuals(self, pt) -> tuple:
        return tuple(_apply(L, pt) for L in self.planes)

    @property
    def discriminant(self) -> Fraction:
        a, b, c = self.conic[:3]
        return b * b - 4 * a * c

    @property
    def is_ellipse(self) -> bool:
        return self.discriminant < 0

    def point(self, u1, u2) -> CandidatePoint:
        o, (d1, d2) = self.origin, self.directions
        return CandidatePoint(*(o[i] + u1 * d1[i] + u2 * d2[i] for i in range(4)))

    def chart_coords(self, pt) -> tuple:
        pt = tuple(pt)
        return pt[self.free[0]], pt[self.free[1]]

    def conic_value(self, u1, u2) -> Fraction:
        a, b, c, d, e, f = self.conic
        return a * u1 * u1 + b * u1 * u2 + c * u2 * u2 + d * u1 + e * u2 + f

    def center(self) -> tuple:
        a, b, c, d, e, _ = self.conic
        return tuple(solve_linear([[2 * a, b], [b, 2 * c]], [-d, -e]))


def conic_region(a: Polynomial, index: int) -> ConicRegion:
    if index not in _LAYOUT:
        raise ValueError(f"region index must be 1, 2 or 3, got {index}")
    if not is_hurwitz(a):
        raise NotHurwitzError("conic regions need a Hurwitz sextic")
    F = functionals(a)
    plane_names, quad_names, pivots = _LAYOUT[index]
    planes = tuple(F[n] for n in plane_names)
    quadric = tuple(F[n] for n in quad_names)
    candidates = list(pivots) + [
        (i, j) for i in range(4) for j in range(i + 1, 4) if (i, j) not in pivots
    ]
    for piv in candidates:
        det = planes[0][piv[0]] * planes[1][piv[1]] - planes[0][piv[1]] * planes[1][piv[0]]
        if det != 0:
            break
    else:  # pragma: no cover - planes are independent for Hurwitz input
        raise ValueError("degenerate plane pair")
    free = tuple(i for i in range(4) if i not in piv)
    M = [[pl[piv[0]], pl[piv[1]]] for pl in planes]

    def lift(vals_free, with_const):
        rhs = [
            -(pl[4] if with_const else 0) - sum(pl[f] * v for f, v in zip(free, vals_free))
            for pl in planes
        ]
        sol = solve_linear(M, rhs)
        out = [Fraction(0)] * 4
        for f, v in zip(free, vals_free):
            out[f] = Fraction(v)
        out[piv[0]], out[piv[1]] = sol
        return tuple(out)

    origin = lift((0, 0), True)
    d1 = lift((1, 0), False)
    d2 = lift((0, 1), False)
    l1, l2, l3 = (_affine2(L, origin, d1, d2) for L in quadric)
    sq, cross = _mul2(l1, l1), _mul2(l2, l3)
    conic = tuple(s - 4 * c for s, c in zip(sq, cross))
    region = ConicRegion(index, planes, quadric, free, origin, (d1, d2), conic)
    return replace(region, anchor=_anchor(a, region))


# ---------------------------------------------------------------------------
# closed-form tangency points


@dataclass(frozen=True)
class TangencyPair:
    first: CandidatePoint
    second: CandidatePoint
    tangent_lines: tuple  # functional-name triples, e.g. ("D", "E", "A")


def _div(num, den, index, which, expr):
    if den == 0:
        raise DegenerateDenominatorError(index, which, expr)
    return num / den


def tangency_points(a: Polynomial, index: int) -> TangencyPair:
    """Closed-form tangency points of region ``index`` with its two lines."""
    if index not in _LAYOUT:
        raise ValueError(f"region index must be 1, 2 or 3, got {index}")
    a1, a2, a3, a4, a5, a6 = _sextic_coeffs(a)
    if index == 1:
        den = -a5 * a4 * a1 + a5**2 + a3 * a6 * a1
        expr = "-a5*a4*a1 + a5^2 + a3*a6*a1"
        y = _div(a5 * a6 * a1 - a5 * a4 * a2 * a1 + a5 * a4 * a3 + a3 * a6 * a2 * a1 - a3**2 * a6,
                 den, 1, "first", expr)
        k = a5 * a2 * a1 - a6 * a1**2 - a5 * a3
        first = CandidatePoint(a1, y, -a5 * k / den, -a6 * k / den)

        den = (a5**2 * a2**2 - a5**2 * a4 + a5 * a4**2 * a1 - 2 * a5 * a6 * a1 * a2
               - a3 * a6 * a1 * a4 + a6**2 * a1**2 + a5 * a3 * a6 - a5 * a3 * a4 * a2
               + a3**2 * a6 * a2)
        expr = ("a5^2*a2^2 - a5^2*a4 + a5*a4^2*a1 - 2*a5*a6*a1*a2 - a3*a6*a1*a4"
                " + a6^2*a1^2 + a5*a3*a6 - a5*a3*a4*a2 + a3^2*a6*a2")
        x = _div(-a5**3 + a5**2 * a4 * a1 + a3**3 * a6 + a5**2 * a2 * a3 - a5 * a3**2 * a4
                 - 2 * a5 * a3 * a6 * a1, den, 1, "second", expr)
        y = (a6 * a4 * a3**2 - a3 * a6**2 * a1 - a3 * a5 * a4**2 - a5**2 * a6 + a5**2 * a4 * a2) / den
        k = a2 * a5**2 - a5 * a6 * a1 - a5 * a4 * a3 + a3**2 * a6
        second = CandidatePoint(x, y, a5 * k / den, a6 * k / den)
    elif index == 2:
        den = -a2 * a1 * a5 + a1**2 * a6 + a3 * a5
        expr = "-a2*a1*a5 + a1^2*a6 + a3*a5"
        y = _div(-a5**2 + a5 * a4 * a1 - a5 * a2**2 * a1 + a5 * a2 * a3 + a6 * a1**2 * a2
                 - a1 * a6 * a3, den, 2, "first", expr)
        k = a3**2 - a3 * a2 * a1 + a4 * a1**2 - a1 * a5
        first = CandidatePoint(a1, y, a5 * k / den, a6 * k / den)

        den = -a5**2 * a2 + a5 * a4 * a3 - a3**2 * a6 + a5 * a6 * a1
        expr = "-a5^2*a2 + a5*a4*a3 - a3^2*a6 + a5*a6*a1"
        y = _div(a4**2 * a5 * a1 - a3 * a4 * a1 * a6 - a5**2 * a4 + a3 * a5 * a6
                 - a2 * a1 * a5 * a6 + a1**2 * a6**2, den, 2, "second", expr)
        k = a5 * a4 * a1 - a1 * a6 * a3 - a5**2
        second = CandidatePoint(a1, y, a5 * k / den, a6 * k / den)
    else:
        den = a3**2 - a3 * a2 * a1 + a4 * a1**2 - a1 * a5
        expr = "a3^2 - a3*a2*a1 + a4*a1^2 - a1*a5"
        y = -_div(a3 * a5 + a3 * a2**2 * a1 + a1**2 * a6 - a2 * a3**2 - a4 * a2 * a1**2,
                  den, 3, "first", expr)
        z = -(a2 * a1 * a3**2 - a2 * a1**2 * a5 + 2 * a1 * a3 * a5 + a1**3 * a6 - a3**3
              - a3 * a4 * a1**2) / den
        p = -(2 * a5 * a4 * a1 + a4 * a1 * a2 * a3 - a5**2 - a5 * a2**2 * a1 + a5 * a2 * a3
              - a1 * a6 * a3 + a6 * a1**2 * a2 - a4 * a3**2 - a4**2 * a1**2) / den
        first = CandidatePoint(a1, y, z, p)

        den = a5 * a4 * a1 - a1 * a6 * a3 - a5**2
        expr = "a5*a4*a1 - a1*a6*a3 - a5^2"
        y = -_div(a5 * a6 * a1 - a5 * a4 * a2 * a1 + a5 * a4 * a3 + a3 * a6 * a2 * a1
                  - a3**2 * a6, den, 3, "second", expr)
        k = -a2 * a1 * a5 + a1**2 * a6 + a3 * a5
        second = CandidatePoint(a1, y, -a5 * k / den, -a6 * k / den)
    planes = _LAYOUT[index][0]
    extra = _TANGENT_EXTRA[index]
    lines = (planes + (extra[0],), planes + (extra[1],))
    return TangencyPair(first, second, lines)


def line_restriction(a: Polynomial, index: int, line: tuple, through: CandidatePoint) -> tuple:
    """Quadric of region ``index`` restricted to a line through ``through``.

    ``line`` names three functionals whose common zero set is the line.
    Returns the coefficients (k2, k1, k0) of the quadratic in the line
    parameter, with the parameter 0 at ``through``.
    """
    F = functionals(a)
    rows = [F[n][:4] for n in line]
    # direction: kernel of the 3x4 system; fix one coordinate to 1
    for fixed in range(4):
        others = [i for i in range(4) if i != fixed]
        M = [[r[i] for i in others] for r in rows]
        try:
            sol = solve_linear(M, [-r[fixed] for r in rows])
        except ZeroDivisionError:
            continue
        direction = [Fraction(0)] * 4
        direction[fixed] = Fraction(1)
        for i, v in zip(others, sol):
            direction[i] = v
        break
    else:  # pragma: no cover
        raise ValueError("line functionals are not independent")
    region = conic_region(a, index)
    L1, L2, L3 = region.quadric
    pt = tuple(through)

    def aff(L):
        return (_apply(L, pt), sum(L[i] * direction[i] for i in range(4)))

    f, g, h = aff(L1), aff(L2), aff(L3)
    return (
        f[1] * f[1] - 4 * g[1] * h[1],
        2 * f[0] * f[1] - 4 * (g[0] * h[1] + g[1] * h[0]),
        f[0] * f[0] - 4 * g[0] * h[0],
    )


# ---------------------------------------------------------------------------
# sampling


def _anchor(a: Polynomial, region: ConicRegion) -> tuple:
    for which in ("first", "second"):
        try:
            base = getattr(tangency_points(a, region.index), which)
        except DegenerateDenominatorError:
            continue
        if region.quadric_value(base) == 0:
            return region.chart_coords(base)
    if not region.is_ellipse:
        return ()
    # both closed forms degenerate: a float point on the horizontal chord
    # through the centre (only approximately on the curve)
    uc = region.center()
    aa, b, c, d, e, f = region.conic
    k1 = b * uc[1] + d
    k0 = c * uc[1] ** 2 + e * uc[1] + f
    disc = float(k1 * k1 - 4 * aa * k0)
    u = Fraction((-float(k1) + math.sqrt(max(disc, 0.0))) / (2 * float(aa)))
    return (u, uc[1])


def sample_ellipse(region: ConicRegion, n: int) -> list:
    """``n`` rational points retracted slightly inside the ellipse of ``region``.

    Sample 0 is the (retracted) first tangency point; the rest come from the
    chord construction through that point at evenly spread directions.
    """
    if n < 1:
        return []
    if not region.is_ellipse:
        raise ValueError("region is not an ellipse")
    u0 = region.anchor
    uc = region.center()
    aa, b, c, d, e, _ = region.conic
    g1 = 2 * aa * u0[0] + b * u0[1] + d
    g2 = b * u0[0] + 2 * c * u0[1] + e
    pts = [u0]
    for k in range(1, n):
        m = Fraction(math.tan(math.pi * k / (2 * n))).limit_denominator(4096)
        w = (1 - m * m, 2 * m)
        quad = aa * w[0] ** 2 + b * w[0] * w[1] + c * w[1] ** 2
        tau = -(g1 * w[0] + g2 * w[1]) / quad
        pts.append((u0[0] + tau * w[0], u0[1] + tau * w[1]))
    out = []
    for u in pts:
        r = (uc[0] + RETRACTION * (u[0] - uc[0]), uc[1] + RETRACTION * (u[1] - uc[1]))
        out.append(region.point(*r))
    return out


SEED_OFFSETS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
_PAIRS = ((0, 1), (0, 2), (1, 2))


def omega_seed_candidates(a: Polynomial, b: Polynomial, n: int) -> list:
    """Points on segments between samples of distinct regions of one polynomial.

    For each of ``a`` and ``b``: sample every region ``n`` times, pair the
    k-th samples of each of the 3 region pairs, and emit the points at
    offsets 1/4, 1/2, 3/4. Output size is 2 * 3 * 3 * n (a's seeds first).
    """
    out = []
    if n <= 0:
        return out
    for q in (a, b):
        samples = [sample_ellipse(conic_region(q, i), n) for i in (1, 2, 3)]
        for i, j in _PAIRS:
            for k in range(n):
                for w in SEED_OFFSETS:
                    out.append(samples[i][k].lerp(samples[j][k], w))
    return out
