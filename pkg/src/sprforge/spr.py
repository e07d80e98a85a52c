"""Real-part numerators and exact strict-positive-realness verdicts.

For a ratio c(s)/q(s) and t = w**2,

    Re[c(jw)/q(jw)] = N(t) / |q(jw)|**2,
    N(t) = ce(-t)*qe(-t) + t*co(-t)*qo(-t),

so the frequency condition reduces to polynomial positivity of N on t >= 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly_core import (
    DegreeError,
    Polynomial,
    PositivityVerdict,
    Verdict,
    even_odd_split,
    is_positive_on_nonneg,
    routh_hurwitz,
)


class InvariantError(AssertionError):
    """A property the theory guarantees failed to hold."""


@dataclass(frozen=True)
class CandidatePoint:
    x: Fraction
    y: Fraction
    z: Fraction
    p: Fraction

    def __iter__(self):
        return iter((self.x, self.y, self.z, self.p))

    def __getitem__(self, i):
        return (self.x, self.y, self.z, self.p)[i]

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.z, self.p)

    def is_positive(self) -> bool:
        return all(v > 0 for v in self)

    def lerp(self, other: "CandidatePoint", w) -> "CandidatePoint":
        """(1 - w)*self + w*other."""
        return CandidatePoint(*(u + (v - u) * w for u, v in zip(self, other)))


@dataclass(frozen=True)
class GCoefficients:
    """g(t) = A t^4 + B t^3 + C t^2 + D t + E."""

    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction
    E: Fraction

    def as_tuple(self) -> tuple:
        return (self.A, self.B, self.C, self.D, self.E)

    def polynomial(self) -> Polynomial:
        return Polynomial([self.E, self.D, self.C, self.B, self.A])


def _sextic_coeffs(q: Polynomial) -> tuple:
    if q.degree != 6 or q.lc != 1:
        raise DegreeError("expected a monic sextic")
    # (q1, ..., q6) with q = s^6 + q1 s^5 + ... + q6
    return tuple(q.coeff(6 - i) for i in range(1, 7))


def g_functionals(q: Polynomial) -> tuple:
    """Affine maps (x, y, z, p, 1) -> (A, B, C, D, E) as five rational rows.

    Row k holds the coefficients of functional k on (x, y, z, p) followed by
    its constant term.
    """
    q1, q2, q3, q4, q5, q6 = _sextic_coeffs(q)
    z0 = Fraction(0)
    return (
        (Fraction(-1), z0, z0, z0, q1),
        (q2, -q1, Fraction(1), z0, -q3),
        (-q4, q3, -q2, q1, q5),
        (q6, -q5, q4, -q3, z0),
        (z0, z0, -q6, q5, z0),
    )


def g_coefficients(q: Polynomial, pt: CandidatePoint) -> GCoefficients:
    q1, q2, q3, q4, q5, q6 = _sextic_coeffs(q)
    x, y, z, p = pt
    return GCoefficients(
        A=q1 - x,
        B=q2 * x + z - q1 * y - q3,
        C=q5 + q3 * y + q1 * p - q2 * z - q4 * x,
        D=q6 * x + q4 * z - q3 * p - q5 * y,
        E=q5 * p - q6 * z,
    )


def epsilon_tail(q: Polynomial) -> Polynomial:
    """h(t) = t^5 - q2 t^4 + (q4 - 1) t^3 + (q2 - q6) t^2 - q4 t + q6."""
    q1, q2, q3, q4, q5, q6 = _sextic_coeffs(q)
    return Polynomial([q6, -q4, q2 - q6, q4 - 1, -q2, 1])


def real_part_numerator(c: Polynomial, q: Polynomial) -> Polynomial:
    if c.degree > q.degree:
        raise DegreeError("numerator degree exceeds denominator degree")
    ce, co = even_odd_split(c)
    qe, qo = even_odd_split(q)
    return ce.reflect() * qe.reflect() + (co.reflect() * qo.reflect()).shift_up()


class HurwitzClass(enum.Enum):
    H6 = "H6"
    H5 = "H5"
    OTHER = "other"


def hurwitz_class(c: Polynomial) -> HurwitzClass:
    if c.degree < 1 or not routh_hurwitz(c).stable:
        return HurwitzClass.OTHER
    if c.degree == 6:
        return HurwitzClass.H6
    if c.degree == 5:
        return HurwitzClass.H5
    return HurwitzClass.OTHER


# diagnostic grid for the normalized margin N(t)/(1+t)^6
_MARGIN_T = np.concatenate(([0.0], np.logspace(-4, 4, 257)))


def normalized_margin(n: Polynomial) -> float:
    vals = np.polyval([float(v) for v in n.descending()], _MARGIN_T)
    return float(np.min(vals / (1.0 + _MARGIN_T) ** 6))


@dataclass(frozen=True)
class SprReport:
    degree_ok: bool
    denominator_hurwitz: bool
    numerator_positive: PositivityVerdict
    margin: float
    numerator_hurwitz_class: HurwitzClass

    @property
    def spr(self) -> bool:
        return self.degree_ok and self.denominator_hurwitz and self.numerator_positive.positive

    def to_dict(self) -> dict:
        return {
            "spr": self.spr,
            "degree_ok": self.degree_ok,
            "denominator_hurwitz": self.denominator_hurwitz,
            "numerator_positive": str(self.numerator_positive),
            "margin": self.margin,
            "numerator_hurwitz_class": self.numerator_hurwitz_class.value,
        }


def verify_spr(c: Polynomial, q: Polynomial) -> SprReport:
    """Exact check of strict positive realness of c/q.

    The frequency condition is checked strictly for every t >= 0, including
    t = 0. A numerator of higher degree than q is reported as failing rather
    than raised.
    """
    degree_ok = c.degree == q.degree and q.degree >= 1
    den_ok = q.degree >= 1 and routh_hurwitz(q).stable
    if c.degree > q.degree:
        pos = PositivityVerdict(Verdict.NEGATIVE_AT)
        return SprReport(degree_ok, den_ok, pos, float("-inf"), hurwitz_class(c))
    n = real_part_numerator(c, q)
    pos = is_positive_on_nonneg(n)
    cls = hurwitz_class(c)
    if den_ok and pos.positive and q.degree == 6 and c.degree in (5, 6):
        if cls is HurwitzClass.OTHER:
            raise InvariantError(f"positive real part but numerator not Hurwitz: {c}")
    return SprReport(degree_ok, den_ok, pos, normalized_margin(n), cls)
