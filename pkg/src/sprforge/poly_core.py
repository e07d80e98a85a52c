"""Exact and floating univariate polynomial algebra.

Polynomials carry their coefficients in ascending order and live in one of
two scalar modes: ``"rational"`` (``fractions.Fraction``) or ``"float"``.
Everything that ends up in a certificate is computed in rational mode; the
float mode exists for search heuristics and diagnostics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence, Union

RATIONAL = "rational"
FLOAT = "float"

Scalar = Union[Fraction, float]


class DegreeError(ValueError):
    """Raised when a polynomial has the wrong degree for an operation."""


class ModeError(TypeError):
    """Raised when scalar modes are mixed or an exact-only op gets floats."""


def _coerce(values: Iterable, mode: Optional[str]):
    out = []
    seen = mode
    for v in values:
        if isinstance(v, bool):
            raise ModeError("booleans are not polynomial coefficients")
        if isinstance(v, Rational):
            if seen == FLOAT:
                out.append(float(v))
                continue
            seen = RATIONAL
            out.append(Fraction(v))
        elif isinstance(v, float):
            if seen == RATIONAL:
                raise ModeError("cannot mix float and rational coefficients")
            if not math.isfinite(v):
                raise ValueError("non-finite coefficient")
            seen = FLOAT
            out.append(v)
        else:
            raise ModeError(f"unsupported coefficient type {type(v).__name__}")
    return out, (seen or RATIONAL)


class Polynomial:
    """Immutable polynomial, ``coeffs[k]`` multiplies ``s**k``."""

    __slots__ = ("coeffs", "mode", "_hash")

    def __init__(self, coeffs: Iterable = (), mode: Optional[str] = None):
        if mode not in (None, RATIONAL, FLOAT):
            raise ValueError(f"unknown mode {mode!r}")
        vals, mode = _coerce(coeffs, mode)
        while vals and vals[-1] == 0:
            vals.pop()
        object.__setattr__(self, "coeffs", tuple(vals))
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, coeffs: list, mode: str) -> "Polynomial":
        # trusted fast path: coeffs already homogeneous in ``mode``
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", tuple(coeffs))
        object.__setattr__(obj, "mode", mode)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def from_descending(cls, coeffs: Sequence, mode: Optional[str] = None) -> "Polynomial":
        return cls(list(reversed(list(coeffs))), mode)

    @classmethod
    def constant(cls, c, mode: Optional[str] = None) -> "Polynomial":
        return cls([c], mode)

    @classmethod
    def monomial(cls, k: int, c=1, mode: Optional[str] = None) -> "Polynomial":
        return cls([0] * k + [c], mode)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self._zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def _zero(self):
        return 0.0 if self.mode == FLOAT else Fraction(0)

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self._zero()

    def descending(self) -> list:
        return list(reversed(self.coeffs))

    def to_float(self) -> "Polynomial":
        return Polynomial._raw([float(c) for c in self.coeffs], FLOAT)

    def to_rational(self) -> "Polynomial":
        if self.mode == RATIONAL:
            return self
        return Polynomial._raw([Fraction(c) for c in self.coeffs], RATIONAL)

    # arithmetic -----------------------------------------------------------

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.mode != self.mode:
                raise ModeError("cannot mix float and rational polynomials")
            return other
        return Polynomial([other], self.mode)

    def __add__(self, other):
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial._raw(out, self.mode)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw([-c for c in self.coeffs], self.mode)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, float) and self.mode == RATIONAL:
                raise ModeError("cannot scale a rational polynomial by a float")
            return Polynomial._raw([c * other for c in self.coeffs], self.mode)
        other = self._lift(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial._raw([], self.mode)
        out = [self._zero()] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial._raw(out, self.mode)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial([1], self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        if len(rem) - 1 < dq:
            return Polynomial._raw([], self.mode), self
        quot = [self._zero()] * (len(rem) - dq)
        bc = other.coeffs
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lc
            quot[k] = c
            if c:
                for j in range(dq + 1):
                    rem[k + j] -= c * bc[j]
            rem[k + dq] = self._zero()
        return Polynomial._raw(quot, self.mode), Polynomial._raw(rem[:dq], self.mode)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __truediv__(self, scalar):
        return Polynomial._raw([c / scalar for c in self.coeffs], self.mode)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, float, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.coeffs)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]}, mode={self.mode!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono:
                terms.append(f"({c})*{mono}")
            else:
                terms.append(f"({c})")
        return " + ".join(terms)

    # calculus and transforms ------------------------------------------------

    def derivative(self) -> "Polynomial":
        return Polynomial._raw([k * c for k, c in enumerate(self.coeffs)][1:], self.mode)

    def reflect(self) -> "Polynomial":
        """p(-t)."""
        return Polynomial._raw(
            [-c if k & 1 else c for k, c in enumerate(self.coeffs)], self.mode
        )

    def shift_up(self, k: int = 1) -> "Polynomial":
        """t**k * p(t)."""
        if self.is_zero():
            return self
        return Polynomial._raw([self._zero()] * k + list(self.coeffs), self.mode)

    def strip_origin(self) -> tuple[int, "Polynomial"]:
        """Split p = t**k * q with q(0) != 0."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return k, Polynomial._raw(list(self.coeffs[k:]), self.mode)

    def monic(self) -> "Polynomial":
        return self / self.lc

    def __call__(self, t):
        return evaluate(self, t)


def evaluate(p: Polynomial, t):
    """Horner evaluation; exact when both ``p`` and ``t`` are rational."""
    acc = p._zero() if not isinstance(t, float) else 0.0
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def even_odd_split(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Return (pe, po) with p(s) = pe(s**2) + s * po(s**2)."""
    c = list(p.coeffs)
    return Polynomial._raw(c[0::2], p.mode), Polynomial._raw(c[1::2], p.mode)


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic GCD over the rationals (zero if both are zero)."""
    _require_rational(p, "poly_gcd")
    while not q.is_zero():
        p, q = q, p % q
    return p if p.is_zero() else p.monic()


def squarefree_part(p: Polynomial) -> Polynomial:
    _require_rational(p, "squarefree_part")
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    return (p // g).monic() if p.lc > 0 else -(p // g).monic()


def sign_variations(values: Iterable) -> int:
    """Number of sign changes in a sequence, zeros skipped."""
    count = 0
    last = 0
    for v in values:
        if v > 0:
            s = 1
        elif v < 0:
            s = -1
        else:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def cauchy_bound(p: Polynomial) -> Fraction:
    """Strict bound: every real root r satisfies |r| < bound."""
    _require_rational(p, "cauchy_bound")
    lc = abs(p.lc)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def _require_rational(p: Polynomial, op: str):
    if p.mode != RATIONAL:
        raise ModeError(f"{op} requires rational coefficients")


# ---------------------------------------------------------------------------
# Routh-Hurwitz


@dataclass(frozen=True)
class RouthTable:
    rows: tuple
    first_column: tuple
    sign_changes: int
    zero_pivot: bool

    @property
    def stable(self) -> bool:
        return not self.zero_pivot and all(v > 0 for v in self.first_column)


def routh_hurwitz(p: Polynomial) -> RouthTable:
    """Routh array of ``p``; a zero pivot stops the table and means "not Hurwitz".

    A negative leading coefficient is handled by negating ``p`` (same roots).
    """
    if p.degree < 1:
        raise DegreeError("Routh test needs degree >= 1")
    if p.lc < 0:
        p = -p
    desc = p.descending()
    n = p.degree
    width = n // 2 + 1
    zero = p._zero()
    r0 = desc[0::2] + [zero] * (width - len(desc[0::2]))
    r1 = desc[1::2] + [zero] * (width - len(desc[1::2]))
    rows = [tuple(r0), tuple(r1)]
    zero_pivot = False
    for _ in range(n - 1):
        prev2, prev = rows[-2], rows[-1]
        piv = prev[0]
        if piv == 0:
            zero_pivot = True
            break
        new = [
            (piv * prev2[j + 1] - prev2[0] * prev[j + 1]) / piv
            for j in range(width - 1)
        ] + [zero]
        rows.append(tuple(new))
    if not zero_pivot and rows[-1][0] == 0:
        zero_pivot = True
    first = tuple(r[0] for r in rows)
    return RouthTable(
        rows=tuple(rows),
        first_column=first,
        sign_changes=sign_variations(first),
        zero_pivot=zero_pivot,
    )


def is_hurwitz(p: Polynomial) -> bool:
    return p.degree >= 1 and routh_hurwitz(p).stable


# ---------------------------------------------------------------------------
# Sturm chains and real roots

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class SturmChain:
    """Canonical chain p, p', -rem(...), ... plus its GCD-reduced twin.

    ``reduced`` is every element divided by the last one; it is the Sturm
    chain of the squarefree part and is what the root counts evaluate.
    """

    chain: tuple
    reduced: tuple

    @property
    def head(self) -> Polynomial:
        return self.chain[0]

    @property
    def gcd(self) -> Polynomial:
        return self.chain[-1]

    def variations(self, x) -> int:
        """Sign variations just to the right of ``x`` (V(x+))."""
        if x == POS_INF or x == NEG_INF:
            signs = []
            for f in self.reduced:
                s = 1 if f.lc > 0 else -1
                if x == NEG_INF and f.degree % 2:
                    s = -s
                signs.append(s)
            return sign_variations(signs)
        x = Fraction(x)
        # zeros skipped: exact right-limit count for a squarefree chain
        return sign_variations(evaluate(f, x) for f in self.reduced)


def sturm_chain(p: Polynomial) -> SturmChain:
    _require_rational(p, "sturm_chain")
    if p.is_zero():
        raise DegreeError("Sturm chain of the zero polynomial")
    chain = [p]
    if p.degree > 0:
        chain.append(p.derivative())
        while True:
            r = -(chain[-2] % chain[-1])
            if r.is_zero():
                break
            chain.append(r)
    g = chain[-1]
    reduced = tuple(f // g for f in chain)
    return SturmChain(chain=tuple(chain), reduced=reduced)


def count_roots(chain: SturmChain, lo=NEG_INF, hi=POS_INF) -> int:
    """Distinct real roots of the chain head in (lo, hi]."""
    if lo is None:
        lo = NEG_INF
    if hi is None:
        hi = POS_INF
    if not lo < hi:
        raise ValueError("count_roots needs lo < hi")
    return chain.variations(lo) - chain.variations(hi)


class Verdict(enum.Enum):
    POSITIVE = "positive"
    ZERO_AT = "zero_at"
    NEGATIVE_AT = "negative_at"


@dataclass(frozen=True)
class PositivityVerdict:
    kind: Verdict
    witness: Optional[Fraction] = None
    interval: Optional[tuple] = None

    @property
    def positive(self) -> bool:
        return self.kind is Verdict.POSITIVE

    def __str__(self):
        if self.positive:
            return "positive"
        if self.interval is not None and self.interval[0] != self.interval[1]:
            lo, hi = self.interval
            return f"{self.kind.value}[{lo}, {hi}]"
        return f"{self.kind.value}({self.witness})"


@dataclass(frozen=True)
class RootInterval:
    """Closed rational interval holding exactly one distinct real root."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def refine(self, p: Polynomial, width) -> "RootInterval":
        """Bisect until narrower than ``width``; ``p`` is squarefree on the interval."""
        lo, hi = self.lo, self.hi
        if lo == hi:
            return self
        s_lo = _sign(evaluate(p, lo))
        if s_lo == 0:
            return RootInterval(lo, lo)
        if _sign(evaluate(p, hi)) == 0:
            return RootInterval(hi, hi)
        width = Fraction(width)
        while hi - lo > width:
            m = (lo + hi) / 2
            s = _sign(evaluate(p, m))
            if s == 0:
                return RootInterval(m, m)
            if s == s_lo:
                lo = m
            else:
                hi = m
        return RootInterval(lo, hi)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def isolate_real_roots(p: Polynomial, lo=None, hi=None) -> list:
    """Disjoint isolating intervals for the distinct real roots of ``p`` in (lo, hi).

    Interval endpoints are never roots (except for exact single-point hits),
    so the sign of the squarefree part changes across each interval.
    """
    _require_rational(p, "isolate_real_roots")
    if p.is_zero():
        raise DegreeError("roots of the zero polynomial")
    if p.degree == 0:
        return []
    chain = sturm_chain(p)
    sqf = chain.reduced[0]
    bound = cauchy_bound(p)
    lo = -bound if lo is None or lo == NEG_INF or lo < -bound else Fraction(lo)
    hi = bound if hi is None or hi == POS_INF or hi > bound else Fraction(hi)
    if not lo < hi:
        return []
    out = []
    # exclude an endpoint root: move the endpoint inward to a root-free spot
    if evaluate(sqf, lo) == 0:
        lo = _nudge(chain, sqf, lo, hi, +1)
    if evaluate(sqf, hi) == 0:
        hi = _nudge(chain, sqf, hi, lo, -1)
    _bisect(chain, sqf, lo, hi, count_roots(chain, lo, hi), out)
    return out


def _nudge(chain, sqf, r, other, direction):
    step = (other - r) / 2 if direction > 0 else (r - other) / 2
    while True:
        cand = r + direction * step
        if evaluate(sqf, cand) != 0:
            a, b = (r, cand) if direction > 0 else (cand, r)
            inside = count_roots(chain, a, b) - (1 if direction < 0 else 0)
            if inside == 0:
                return cand
        step /= 2


def _bisect(chain, sqf, lo, hi, n, out):
    if n == 0:
        return
    if n == 1:
        out.append(RootInterval(lo, hi))
        return
    m = (lo + hi) / 2
    k = 2
    while evaluate(sqf, m) == 0:
        m = lo + (hi - lo) * (Fraction(1, 2) + Fraction(1, 2 ** k))
        k += 1
    left = count_roots(chain, lo, m)
    _bisect(chain, sqf, lo, m, left, out)
    _bisect(chain, sqf, m, hi, n - left, out)


def is_positive_on_nonneg(p: Polynomial) -> PositivityVerdict:
    """Exact test of p(t) > 0 for every t >= 0, with a witness when it fails."""
    _require_rational(p, "is_positive_on_nonneg")
    if p.is_zero():
        return PositivityVerdict(Verdict.ZERO_AT, Fraction(0), (Fraction(0), Fraction(0)))
    v0 = p.coeffs[0]
    zero = Fraction(0)
    if v0 < 0:
        return PositivityVerdict(Verdict.NEGATIVE_AT, zero, (zero, zero))
    if v0 == 0:
        return PositivityVerdict(Verdict.ZERO_AT, zero, (zero, zero))
    if p.lc < 0:
        b = cauchy_bound(p)
        return PositivityVerdict(Verdict.NEGATIVE_AT, b, (b, b))
    if sign_variations(p.coeffs) == 0:
        # Descartes: no sign change, no positive root
        return PositivityVerdict(Verdict.POSITIVE)
    roots = isolate_real_roots(p, lo=0)
    if not roots:
        return PositivityVerdict(Verdict.POSITIVE)
    for r in roots:
        v = evaluate(p, r.hi)
        if v < 0:
            return PositivityVerdict(Verdict.NEGATIVE_AT, r.hi, (r.hi, r.hi))
    sqf = squarefree_part(p)
    r = roots[0].refine(sqf, roots[0].width / 2 ** 40)
    return PositivityVerdict(Verdict.ZERO_AT, r.mid, (r.lo, r.hi))


def is_positive_on_open_halfline(p: Polynomial) -> PositivityVerdict:
    """p(t) > 0 for every t > 0; a zero exactly at t = 0 is allowed."""
    k, q = p.strip_origin()
    if p.is_zero():
        return is_positive_on_nonneg(p)
    return is_positive_on_nonneg(q)


def bound_on_interval(p: Polynomial, lo: Fraction, hi: Fraction) -> tuple:
    """Rational enclosure (lower, upper) of p over [lo, hi] with 0 <= lo <= hi.

    Splits p into its positive- and negative-coefficient parts, both of
    which are nondecreasing on t >= 0.
    """
    if lo < 0:
        raise ValueError("bound_on_interval needs a nonnegative interval")
    pos = Polynomial._raw([c if c > 0 else Fraction(0) for c in p.coeffs], RATIONAL)
    neg = Polynomial._raw([-c if c < 0 else Fraction(0) for c in p.coeffs], RATIONAL)
    return (
        evaluate(pos, lo) - evaluate(neg, hi),
        evaluate(pos, hi) - evaluate(neg, lo),
    )
