"""Shared oracles and generators for the test suite.

The oracles here deliberately avoid the package's own algorithms: roots come
from numpy companion-matrix eigenvalues and segment stability from a float
Routh array evaluated on a lambda grid.
"""

from fractions import Fraction
import random

import numpy as np
import pytest

from sprforge.poly_core import Polynomial
from sprforge.stability import SegmentProblem, random_stable_segment, random_unstable_segment
from sprforge.synthesis import synthesize

ONE6 = Polynomial([1, 6, 15, 20, 15, 6, 1])  # (s+1)^6
TWO6 = Polynomial([64, 192, 240, 160, 60, 12, 1])  # (s+2)^6


def companion_roots(p: Polynomial) -> np.ndarray:
    desc = [float(c) for c in p.descending()]
    if len(desc) <= 1:
        return np.array([])
    return np.roots(desc)


def distinct_real_roots(p: Polynomial, tol: float = 1e-8, merge: float = 1e-6) -> list:
    roots = companion_roots(p)
    real = sorted(r.real for r in roots if abs(r.imag) < tol)
    out: list = []
    for r in real:
        if not out or abs(r - out[-1]) > merge * max(1.0, abs(r)):
            out.append(r)
    return out


def float_routh_stable(coeffs: np.ndarray) -> np.ndarray:
    """Vectorised Routh test; ``coeffs`` is (batch, n+1) in descending powers."""
    c = np.asarray(coeffs, dtype=float)
    n = c.shape[1] - 1
    width = n // 2 + 1
    r0 = np.zeros((c.shape[0], width))
    r1 = np.zeros((c.shape[0], width))
    r0[:, : len(range(0, n + 1, 2))] = c[:, 0::2]
    r1[:, : len(range(1, n + 1, 2))] = c[:, 1::2]
    ok = (r0[:, 0] > 0) & (r1[:, 0] > 0)
    for _ in range(n - 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = np.zeros_like(r0)
            nxt[:, :-1] = (r1[:, :1] * r0[:, 1:] - r0[:, :1] * r1[:, 1:]) / r1[:, :1]
        ok &= np.isfinite(nxt[:, 0]) & (nxt[:, 0] > 0)
        r0, r1 = r1, nxt
    return ok


def grid_oracle(prob: SegmentProblem, points: int = 1001) -> np.ndarray:
    """Stability flags of the segment at lambda = k/(points-1)."""
    a = np.array([float(v) for v in prob.a.descending()])
    b = np.array([float(v) for v in prob.b.descending()])
    lam = np.linspace(0.0, 1.0, points)[:, None]
    return float_routh_stable(a * (1 - lam) + b * lam)


def abs2_at(p: Polynomial, omega: float) -> float:
    v = np.polyval([float(c) for c in p.descending()], 1j * omega)
    return float(abs(v) ** 2)


def random_poly(rng: random.Random, degree: int, bound: int = 10, den: int = 1) -> Polynomial:
    while True:
        coeffs = [Fraction(rng.randint(-bound, bound), rng.randint(1, den)) for _ in range(degree + 1)]
        if coeffs[-1] != 0:
            return Polynomial(coeffs)


@pytest.fixture(scope="session")
def certified_corpus():
    """First 100 certificates of a fixed-seed stable-segment run."""
    out = []
    seed = 0
    while len(out) < 100:
        prob = random_stable_segment(10_000 + seed)
        seed += 1
        out.append((prob, synthesize(prob)))
    return out


@pytest.fixture(scope="session")
def unstable_corpus():
    return [random_unstable_segment(seed) for seed in range(50)]
