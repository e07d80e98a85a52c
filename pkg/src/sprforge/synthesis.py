"""Construction of a common SPR numerator for a stable sextic segment.

Pipeline: endpoint and segment stability -> a point (x, y, z, p) whose
quartic g(t) is positive on t > 0 against both endpoints -> epsilon and the
quintic s^5 + (x-eps) s^4 + y s^3 + z s^2 + p s + eps -> delta-lift by a
monic sextic d(s) -> exact re-verification of both ratios.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from scipy.optimize import linprog

from .geometry import omega_seed_candidates
from .poly_core import (
    Polynomial,
    bound_on_interval,
    evaluate,
    is_positive_on_nonneg,
    is_positive_on_open_halfline,
    isolate_real_roots,
)
from .spr import (
    CandidatePoint,
    GCoefficients,
    _sextic_coeffs,
    epsilon_tail,
    g_coefficients,
    g_functionals,
    real_part_numerator,
    verify_spr,
)
from .stability import (
    CrossingWitness,
    RangeError,
    SegmentProblem,
    segment_stable,
)

log = logging.getLogger(__name__)

DEFAULT_LIFT = Polynomial([1, 6, 15, 20, 15, 6, 1])  # (s+1)^6

LP_GRID = np.logspace(-4, 4, 64)
MAX_CUT_ROUNDS = 32
MAX_EPS_HALVINGS = 64
MAX_DELTA_EXPONENT = 200
SEED_SAMPLES = 4


class SearchExhaustedError(RuntimeError):
    def __init__(self, msg, margin=None, witnesses=()):
        super().__init__(msg)
        self.margin = margin
        self.witnesses = list(witnesses)


class LiftExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeasiblePoint:
    point: CandidatePoint
    g_a: GCoefficients
    g_b: GCoefficients
    margins: tuple


@dataclass(frozen=True)
class SegmentUnstableRefusal:
    witness: Optional[CrossingWitness]
    verdict: str = "segment_unstable"


@dataclass(frozen=True)
class EndpointUnstableRefusal:
    which: str
    verdict: str = "endpoint_unstable"


@dataclass
class SprCertificate:
    problem: SegmentProblem
    point: FeasiblePoint
    epsilon: Fraction
    quintic: Polynomial
    delta: Fraction
    lift_direction: Polynomial
    c_tilde: Polynomial
    reports: tuple  # (SprReport vs a, SprReport vs b)
    trace: list = field(default_factory=list)

    verdict = "certified"

    @property
    def certified(self) -> bool:
        return all(r.spr for r in self.reports)


SynthesisResult = Union[SprCertificate, SegmentUnstableRefusal, EndpointUnstableRefusal]


# ---------------------------------------------------------------------------
# feasible point search


def _g_matrix(q: Polynomial) -> np.ndarray:
    """5x5 float matrix: rows A..E over (x, y, z, p, 1)."""
    return np.array([[float(v) for v in row] for row in g_functionals(q)])


def _grid_rows(G: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Rows of g(t)/(1+t)^4 as affine maps of (x, y, z, p, 1), one per t."""
    powers = np.stack([ts**4, ts**3, ts**2, ts, np.ones_like(ts)], axis=1)
    return (powers @ G) / ((1.0 + ts) ** 4)[:, None]


def _float_margin(Ga, Gb, pts: np.ndarray, ts: np.ndarray) -> np.ndarray:
    ext = np.hstack([pts, np.ones((len(pts), 1))])
    ra = ext @ _grid_rows(Ga, ts).T
    rb = ext @ _grid_rows(Gb, ts).T
    return np.minimum(ra.min(axis=1), rb.min(axis=1))


def certify_point(prob: SegmentProblem, pt: CandidatePoint) -> tuple:
    """Exact check that g_a, g_b > 0 on t > 0; returns (ok, witness abscissae)."""
    witnesses = []
    if not pt.is_positive():
        return False, witnesses
    for q in (prob.a, prob.b):
        g = g_coefficients(q, pt).polynomial()
        v = is_positive_on_open_halfline(g)
        if not v.positive:
            witnesses.append(v.witness if v.witness is not None else Fraction(0))
    return not witnesses, witnesses


def _make_feasible(prob, pt, margin) -> FeasiblePoint:
    return FeasiblePoint(
        point=pt,
        g_a=g_coefficients(prob.a, pt),
        g_b=g_coefficients(prob.b, pt),
        margins=margin,
    )


def _simplest(prob, pt: CandidatePoint) -> CandidatePoint:
    # seeds carry large denominators; a nearby small-denominator point keeps
    # every later exact computation cheap
    for den in (1 << 8, 1 << 12, 1 << 20):
        cand = CandidatePoint(*(v.limit_denominator(den) for v in pt))
        if certify_point(prob, cand)[0]:
            return cand
    return pt


def _diag_margins(prob, pt) -> tuple:
    ts = np.concatenate(([0.0], np.logspace(-4, 4, 257)))
    out = []
    for q in (prob.a, prob.b):
        g = g_coefficients(q, pt).polynomial().to_float()
        vals = ts * np.polyval(g.descending() or [0.0], ts)
        out.append(float(np.min(vals[1:] / (1 + ts[1:]) ** 6)))
    return tuple(out)


def _rationalize(v: np.ndarray, den: int) -> CandidatePoint:
    return CandidatePoint(*(Fraction(float(c)).limit_denominator(den) for c in v))


def _solve_lp(Ga, Gb, ts, lower, upper):
    rows = np.vstack([
        _grid_rows(Ga, ts),
        _grid_rows(Gb, ts),
        Ga[0:1],  # t -> infinity: A >= m
        Gb[0:1],
    ])
    # g-row . (v, 1) >= m   <=>   -g-row[:4] . v + m <= g-row[4]
    A_ub = np.hstack([-rows[:, :4], np.ones((len(rows), 1))])
    b_ub = rows[:, 4]
    bounds = [(lower, upper)] * 4 + [(None, upper)]
    res = linprog(
        c=[0, 0, 0, 0, -1.0], A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs"
    )
    if res.status != 0:
        return None, -math.inf
    return res.x[:4], float(res.x[4])


def find_feasible_point(prob: SegmentProblem, trace: Optional[list] = None) -> FeasiblePoint:
    """Point whose quartics against both endpoints are positive on t > 0.

    Stage 1 screens the ellipse-segment seeds of both endpoints, stage 2
    maximises a normalised grid margin by linear programming, stage 3 adds
    the exact certifier's witness abscissae to the grid and re-solves.
    """
    trace = trace if trace is not None else []
    Ga, Gb = _g_matrix(prob.a), _g_matrix(prob.b)

    seeds = omega_seed_candidates(prob.a, prob.b, SEED_SAMPLES)
    arr = np.array([[float(v) for v in s] for s in seeds])
    margins = _float_margin(Ga, Gb, arr, LP_GRID)
    order = np.argsort(-margins)
    for idx in order[:3]:
        if margins[idx] <= 0:
            break
        ok, _ = certify_point(prob, seeds[idx])
        if ok:
            pt = _simplest(prob, seeds[idx])
            trace.append({"step": "feasible", "stage": 1, "seed_index": int(idx),
                          "grid_margin": float(margins[idx])})
            return _make_feasible(prob, pt, _diag_margins(prob, pt))
    trace.append({"step": "seeds_screened", "count": len(seeds),
                  "best_grid_margin": float(margins[order[0]]) if len(seeds) else None})

    scale = max(float(abs(c)) for q in (prob.a, prob.b) for c in q.coeffs)
    lower, upper = 1e-9, 1e3 * (1 + scale)
    ts = LP_GRID.copy()
    witnesses: list = []
    m = -math.inf
    for rnd in range(MAX_CUT_ROUNDS + 1):
        v, m = _solve_lp(Ga, Gb, ts, lower, upper)
        if v is None or m <= 0:
            break
        for den in (1 << 8, 1 << 12, 1 << 20, 1 << 32):
            pt = _rationalize(v, den)
            ok, wit = certify_point(prob, pt)
            if ok:
                trace.append({"step": "feasible", "stage": 2 if rnd == 0 else 3,
                              "round": rnd, "lp_margin": m, "denominator": den})
                return _make_feasible(prob, pt, _diag_margins(prob, pt))
        new = [float(w) for w in wit if 0 <= float(w) < 1e12]
        witnesses.extend(new)
        trace.append({"step": "cut", "round": rnd, "lp_margin": m, "witnesses": new})
        if not new:
            break
        ts = np.unique(np.concatenate([ts, new]))
    raise SearchExhaustedError(
        f"no certified feasible point (last LP margin {m})", margin=m, witnesses=witnesses
    )


# ---------------------------------------------------------------------------
# epsilon


def _cover_nonpositive(h: Polynomial) -> list:
    """Rational intervals in (0, inf) covering {t >= 0 : h(t) <= 0}."""
    roots = isolate_real_roots(h, lo=0)
    pieces = [(iv.lo, iv.hi) for iv in roots]
    for left, right in zip(roots, roots[1:]):
        if evaluate(h, left.hi) < 0:
            pieces.append((left.hi, right.lo))
    pieces.sort()
    merged: list = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def _lower_bound(p: Polynomial, lo: Fraction, hi: Fraction, pieces: int = 16, depth: int = 40):
    """Certified positive lower bound of p on [lo, hi], or None."""
    step = (hi - lo) / pieces
    stack = [(lo + k * step, lo + (k + 1) * step, 0) for k in range(pieces)]
    best = None
    while stack:
        a, b, d = stack.pop()
        low, _ = bound_on_interval(p, a, b)
        if low > 0:
            best = low if best is None else min(best, low)
        elif d >= depth:
            return None
        else:
            m = (a + b) / 2
            stack += [(a, m, d + 1), (m, b, d + 1)]
    return best


def _upper_abs(p: Polynomial, lo: Fraction, hi: Fraction, pieces: int = 16) -> Fraction:
    step = (hi - lo) / pieces
    best = Fraction(0)
    for k in range(pieces):
        low, high = bound_on_interval(p, lo + k * step, lo + (k + 1) * step)
        best = max(best, abs(low), abs(high))
    return best


def _dyadic_floor(v: Fraction) -> Fraction:
    k = math.floor(math.log2(v.numerator) - math.log2(v.denominator))
    out = Fraction(2) ** k
    while out > v:
        out /= 2
    while out * 2 <= v:
        out *= 2
    return out


def epsilon_bounds(q: Polynomial, g: GCoefficients) -> Optional[tuple]:
    """(M, N) with t*g >= M and |h| <= N on {h <= 0}; None if that set is empty."""
    h = epsilon_tail(q)
    cover = _cover_nonpositive(h)
    if not cover:
        return None
    tg = g.polynomial().shift_up()
    M = None
    N = Fraction(0)
    for lo, hi in cover:
        if lo <= 0:
            lo = _first_positive(h, hi)
        low = _lower_bound(tg, lo, hi)
        if low is None:
            raise SearchExhaustedError("t*g(t) not certifiably positive on {h <= 0}")
        M = low if M is None else min(M, low)
        N = max(N, _upper_abs(h, lo, hi))
    return M, N


def _first_positive(h: Polynomial, hi: Fraction) -> Fraction:
    # largest 2^-k * hi with h > 0 on [0, that]; h(0) = q6 > 0
    lo = hi / 2
    while True:
        if evaluate(h, lo) > 0:
            roots = isolate_real_roots(h, lo=0, hi=lo)
            if not roots:
                return lo
        lo /= 2


def epsilon_for(prob: SegmentProblem, fp: FeasiblePoint, trace: Optional[list] = None) -> Fraction:
    trace = trace if trace is not None else []
    bounds = []
    for name, q, g in (("a", prob.a, fp.g_a), ("b", prob.b, fp.g_b)):
        mn = epsilon_bounds(q, g)
        if mn is None:
            trace.append({"step": "epsilon_bound", "endpoint": name, "constraint": None})
            continue
        M, N = mn
        bounds.append(M / (2 * N))
        trace.append({"step": "epsilon_bound", "endpoint": name, "M": str(M), "N": str(N),
                      "bound": str(M / (2 * N))})
    half_x = fp.point.x / 2
    eps = half_x if not bounds else min(_dyadic_floor(min(bounds)), half_x)
    trace.append({"step": "epsilon", "value": str(eps), "x_half": str(half_x)})
    return eps


def build_quintic(fp: FeasiblePoint, eps) -> Polynomial:
    eps = Fraction(eps)
    x, y, z, p = fp.point
    if not 0 < eps < x:
        raise RangeError(f"epsilon {eps} outside (0, x={x})")
    return Polynomial([eps, p, z, y, x - eps, 1])


def _quintic_ok(prob, c) -> bool:
    return all(is_positive_on_nonneg(real_part_numerator(c, q)).positive for q in (prob.a, prob.b))


# ---------------------------------------------------------------------------
# delta lift


def lift_to_sextic(quintic: Polynomial, prob: SegmentProblem, d: Polynomial,
                   trace: Optional[list] = None) -> tuple:
    """Smallest k with delta = 2^-k making quintic + delta*d SPR against a and b."""
    if d.degree != 6 or d.lc != 1:
        raise ValueError("lift direction must be a monic sextic")
    trace = trace if trace is not None else []
    delta = Fraction(1)
    for k in range(MAX_DELTA_EXPONENT + 1):
        c = quintic + d * delta
        ra = verify_spr(c, prob.a)
        if ra.spr:
            rb = verify_spr(c, prob.b)
            if rb.spr:
                trace.append({"step": "delta", "value": str(delta), "exponent": k})
                return c, delta, (ra, rb)
        delta /= 2
    raise LiftExhaustedError(f"no delta >= 2^-{MAX_DELTA_EXPONENT} certified")


# ---------------------------------------------------------------------------
# pipeline


def synthesize(prob: SegmentProblem, d: Optional[Polynomial] = None) -> SynthesisResult:
    """Run the full construction; refusals are returned, not raised."""
    d = DEFAULT_LIFT if d is None else d
    trace: list = []
    verdict = segment_stable(prob)
    bad = verdict.unstable_endpoint
    if bad is not None:
        trace.append({"step": "refuse", "reason": "endpoint_unstable", "which": bad})
        log.info("endpoint %s is not Hurwitz", bad)
        return EndpointUnstableRefusal(bad)
    if not verdict.stable:
        log.info("segment leaves the Hurwitz set")
        return SegmentUnstableRefusal(verdict.crossing_witness)
    trace.append({"step": "segment_stable"})

    fp = find_feasible_point(prob, trace)
    log.debug("feasible point %s", fp.point)
    eps = epsilon_for(prob, fp, trace)
    quintic = build_quintic(fp, eps)
    halvings = 0
    while not _quintic_ok(prob, quintic):
        halvings += 1
        if halvings > MAX_EPS_HALVINGS:
            raise SearchExhaustedError("epsilon halving exhausted")
        eps /= 2
        quintic = build_quintic(fp, eps)
    if halvings:
        trace.append({"step": "epsilon_halved", "times": halvings, "value": str(eps)})
    trace.append({"step": "quintic", "coeffs": [str(c) for c in quintic.descending()]})

    c_tilde, delta, reports = lift_to_sextic(quintic, prob, d, trace)
    return SprCertificate(
        problem=prob,
        point=fp,
        epsilon=eps,
        quintic=quintic,
        delta=delta,
        lift_direction=d,
        c_tilde=c_tilde,
        reports=reports,
        trace=trace,
    )


def tangent_plane_residual(q: Polynomial, u, v):
    """u v^3 - q1 v^3 - q2 u v^2 + q3 v^2 + q4 u v - q5 v - q6 u."""
    q1, q2, q3, q4, q5, q6 = _sextic_coeffs(q)
    return u * v**3 - q1 * v**3 - q2 * u * v**2 + q3 * v**2 + q4 * u * v - q5 * v - q6 * u
