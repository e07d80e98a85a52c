"""Hurwitz stability of single sextics and of the segment lambda*b + (1-lambda)*a."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .poly_core import (
    Polynomial,
    RootInterval,
    even_odd_split,
    evaluate,
    isolate_real_roots,
    poly_gcd,
    routh_hurwitz,
    squarefree_part,
    sturm_chain,
    count_roots,
)


class RangeError(ValueError):
    pass


class ExhaustedError(RuntimeError):
    pass


def _check_monic_sextic(p: Polynomial, name: str):
    if p.mode != "rational":
        raise ValueError(f"{name} must have rational coefficients")
    if p.degree != 6 or p.lc != 1:
        raise ValueError(f"{name} must be a monic sextic")


@dataclass(frozen=True)
class SegmentProblem:
    a: Polynomial
    b: Polynomial

    def __post_init__(self):
        _check_monic_sextic(self.a, "a")
        _check_monic_sextic(self.b, "b")

    def swapped(self) -> "SegmentProblem":
        return SegmentProblem(self.b, self.a)


@dataclass(frozen=True)
class CrossingWitness:
    """Rational enclosures of a (lambda, omega) where a_lambda(j*omega) = 0."""

    lam: tuple
    omega: tuple

    @property
    def lam_mid(self) -> Fraction:
        return (self.lam[0] + self.lam[1]) / 2

    @property
    def omega_mid(self) -> Fraction:
        return (self.omega[0] + self.omega[1]) / 2


@dataclass(frozen=True)
class SegmentVerdict:
    stable: bool
    endpoint_reports: tuple  # (RouthTable for a, RouthTable for b)
    crossing_witness: Optional[CrossingWitness] = None

    @property
    def unstable_endpoint(self) -> Optional[str]:
        for name, rep in zip("ab", self.endpoint_reports):
            if not rep.stable:
                return name
        return None


def combination(prob: SegmentProblem, lam) -> Polynomial:
    """Coefficient-wise blend a + lam*(b - a)."""
    if isinstance(lam, float):
        lam = Fraction(lam)
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise RangeError(f"lambda={lam} outside [0, 1]")
    if lam == 0:
        return prob.a
    if lam == 1:
        return prob.b
    return prob.a + (prob.b - prob.a) * lam


def _interval_eval(p: Polynomial, lo: Fraction, hi: Fraction) -> tuple:
    """Naive Horner interval enclosure of p over [lo, hi]."""
    acc_lo = acc_hi = Fraction(0)
    for c in reversed(p.coeffs):
        prods = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo, acc_hi = min(prods) + c, max(prods) + c
    return acc_lo, acc_hi


def _sqrt_enclosure(lo: Fraction, hi: Fraction, bits: int = 64) -> tuple:
    scale = 1 << bits
    lo_n = math.isqrt(lo.numerator * scale * scale // lo.denominator)
    hi_q = -(-hi.numerator * scale * scale // hi.denominator)
    hi_n = math.isqrt(hi_q)
    if hi_n * hi_n < hi_q:
        hi_n += 1
    return Fraction(lo_n, scale), Fraction(hi_n, scale)


def sign_at_root(f_sqf: Polynomial, iv: RootInterval, q: Polynomial) -> tuple:
    """Sign of ``q`` at the unique root of squarefree ``f_sqf`` inside ``iv``.

    Returns the sign and the (possibly refined) interval.
    """
    if q.is_zero():
        return 0, iv
    g = poly_gcd(f_sqf, q)
    if g.degree > 0:
        if evaluate(g, iv.lo) == 0:
            return 0, iv
        if iv.lo < iv.hi and count_roots(sturm_chain(g), iv.lo, iv.hi) > 0:
            return 0, iv
    if q.degree == 0:
        return (q.lc > 0) - (q.lc < 0), iv
    qchain = sturm_chain(q)
    while True:
        if iv.lo == iv.hi:
            v = evaluate(q, iv.lo)
            return (v > 0) - (v < 0), iv
        if evaluate(q, iv.lo) != 0 and count_roots(qchain, iv.lo, iv.hi) == 0:
            v = evaluate(q, iv.mid)
            return (v > 0) - (v < 0), iv
        iv = iv.refine(f_sqf, iv.width / 2)


def _axis_parts(p: Polynomial):
    # p(j*w) = P(t) + j*w*Q(t) with t = w**2
    pe, po = even_odd_split(p)
    return pe.reflect(), po.reflect()


def segment_stable(prob: SegmentProblem) -> SegmentVerdict:
    """Exact decision of Hurwitz stability for every member of the segment.

    Both endpoints are Routh-tested; the interior can only lose stability by
    a root crossing the imaginary axis (the degree never drops). With
    t = w**2 > 0 and a_lam(jw) = (P + lam*Pd) + j*w*(Q + lam*Qd), eliminating
    lam leaves E = P*Qd - Q*Pd. At a positive root of E the crossing value
    is lam = -P/Pd (or -Q/Qd), and it lies in (0, 1) exactly when
    P*(P + Pd) < 0 (or Q*(Q + Qd) < 0), i.e. when the real (or imaginary)
    parts of a and b have opposite signs there.
    """
    rep_a, rep_b = routh_hurwitz(prob.a), routh_hurwitz(prob.b)
    reports = (rep_a, rep_b)
    if not (rep_a.stable and rep_b.stable):
        return SegmentVerdict(False, reports)
    if prob.a == prob.b:
        return SegmentVerdict(True, reports)
    P, Q = _axis_parts(prob.a)
    Pb, Qb = _axis_parts(prob.b)
    Pd, Qd = Pb - P, Qb - Q
    E = P * Qd - Q * Pd
    if E.is_zero():
        # only when b == a (a is Hurwitz, so d/a cannot be even)
        return SegmentVerdict(True, reports)
    k, E_red = E.strip_origin()
    if E_red.degree < 1:
        return SegmentVerdict(True, reports)
    e_sqf = squarefree_part(E_red)
    S_re = P * Pb
    S_im = Q * Qb
    for iv in isolate_real_roots(e_sqf, lo=0):
        for S, num, den in ((S_re, P, Pd), (S_im, Q, Qd)):
            sgn, iv = sign_at_root(e_sqf, iv, S)
            if sgn < 0:
                return SegmentVerdict(False, reports, _witness(e_sqf, iv, num, den))
    return SegmentVerdict(True, reports)


def _witness(e_sqf, iv, num, den) -> CrossingWitness:
    width = max(iv.hi, Fraction(1)) / 2 ** 80
    while True:
        iv = iv.refine(e_sqf, width)
        n_lo, n_hi = _interval_eval(num, iv.lo, iv.hi)
        d_lo, d_hi = _interval_eval(den, iv.lo, iv.hi)
        if d_lo > 0 or d_hi < 0:
            break
        width /= 2 ** 16
    # lam = -num/den
    cands = [-n / d for n in (n_lo, n_hi) for d in (d_lo, d_hi)]
    lam = (max(min(cands), Fraction(0)), min(max(cands), Fraction(1)))
    return CrossingWitness(lam=lam, omega=_sqrt_enclosure(iv.lo, iv.hi))


# ---------------------------------------------------------------------------
# instance generators


def _round_poly(coeffs, den: int) -> Polynomial:
    return Polynomial.from_descending([Fraction(round(c * den), den) for c in coeffs])


def _real_coeffs(roots) -> list:
    # expand prod (s - r) in floats, descending order
    c = [1.0 + 0j]
    for r in roots:
        c = [a - r * b for a, b in zip(c + [0], [0] + c)]
    return [v.real for v in c]


def random_stable_sextic(seed: int, spread=2, den: int = 64) -> Polynomial:
    """Seeded monic Hurwitz sextic with rational coefficients (denominator ``den``).

    Real parts of the roots lie in [-spread, -spread/100]; the layout is three
    conjugate pairs half of the time, otherwise two pairs and two real roots.
    """
    spread = float(spread)
    if spread <= 0:
        raise ValueError("spread must be positive")
    rng = random.Random(seed)
    while True:
        roots = []
        pairs = 3 if rng.random() < 0.5 else 2
        for _ in range(pairs):
            sigma = rng.uniform(spread / 100, spread)
            omega = rng.uniform(0, spread)
            roots += [complex(-sigma, omega), complex(-sigma, -omega)]
        for _ in range(6 - 2 * pairs):
            roots.append(complex(-rng.uniform(spread / 100, spread), 0))
        p = _round_poly(_real_coeffs(roots), den)
        if p.degree == 6 and routh_hurwitz(p).stable:
            return p


def random_stable_segment(seed: int, tries: int = 64, spread=2, magnitude=1) -> SegmentProblem:
    """Stable segment: b = a + kappa*(target - a) for an independent sextic target.

    kappa starts at ``magnitude`` and halves until the segment is stable;
    magnitude 0 gives the constant segment b = a.
    """
    if tries < 1:
        raise ValueError("tries must be >= 1")
    rng = random.Random(seed)
    a = random_stable_sextic(rng.getrandbits(63), spread)
    target = random_stable_sextic(rng.getrandbits(63), spread)
    kappa = Fraction(magnitude)
    if not 0 <= kappa <= 1:
        raise ValueError("magnitude must lie in [0, 1]")
    for _ in range(tries):
        b = a + (target - a) * kappa
        if routh_hurwitz(b).stable:
            prob = SegmentProblem(a, b)
            if segment_stable(prob).stable:
                return prob
        kappa /= 2
    raise ExhaustedError(f"no stable segment after {tries} tries (seed={seed})")


def random_unstable_segment(seed: int, tries: int = 10_000, spread=2) -> SegmentProblem:
    """Pair of Hurwitz sextics whose segment leaves the Hurwitz set."""
    rng = random.Random(seed)
    for _ in range(tries):
        a = random_stable_sextic(rng.getrandbits(63), spread)
        b = random_stable_sextic(rng.getrandbits(63), spread)
        prob = SegmentProblem(a, b)
        if not segment_stable(prob).stable:
            return prob
    raise ExhaustedError(f"no unstable segment after {tries} tries (seed={seed})")
