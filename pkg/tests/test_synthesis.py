from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sprforge import synthesis
from sprforge.geometry import conic_region, omega_seed_candidates, sample_ellipse
from sprforge.poly_core import Polynomial, evaluate, is_positive_on_open_halfline
from sprforge.spr import CandidatePoint, epsilon_tail, g_coefficients, verify_spr
from sprforge.stability import RangeError, SegmentProblem, combination, random_stable_sextic, random_unstable_segment
from sprforge.synthesis import (
    DEFAULT_LIFT,
    EndpointUnstableRefusal,
    FeasiblePoint,
    LiftExhaustedError,
    SearchExhaustedError,
    SegmentUnstableRefusal,
    SprCertificate,
    build_quintic,
    epsilon_bounds,
    epsilon_for,
    find_feasible_point,
    lift_to_sextic,
    synthesize,
    tangent_plane_residual,
)

from conftest import ONE6, TWO6, abs2_at


def _fp(pt) -> FeasiblePoint:
    return FeasiblePoint(pt, g_coefficients(ONE6, pt), g_coefficients(ONE6, pt), (0.0, 0.0))


def test_feasible_point_on_clean_instance():
    prob = SegmentProblem(ONE6, ONE6)
    fp = find_feasible_point(prob)
    for g in (fp.g_a, fp.g_b):
        assert is_positive_on_open_halfline(g.polynomial().shift_up()).positive
    assert fp.point.is_positive()
    # the region-1 tangency seed paired with region 2 is screened in stage 1
    s1 = sample_ellipse(conic_region(ONE6, 1), 1)[0]
    s2 = sample_ellipse(conic_region(ONE6, 2), 1)[0]
    assert s1.lerp(s2, Fraction(1, 2)) in omega_seed_candidates(ONE6, ONE6, synthesis.SEED_SAMPLES)


def test_feasible_point_invariant_on_random_segments(certified_corpus):
    for prob, cert in certified_corpus[:40]:
        fp = cert.point
        for q, g in ((prob.a, fp.g_a), (prob.b, fp.g_b)):
            assert g == g_coefficients(q, fp.point)
            tg = g.polynomial().shift_up()
            assert evaluate(tg, 0) == 0
            assert is_positive_on_open_halfline(tg).positive


def test_search_exhausts_on_unstable_segment():
    prob = random_unstable_segment(0)
    with pytest.raises(SearchExhaustedError) as exc:
        find_feasible_point(prob)
    assert exc.value.margin is not None


def test_build_quintic_examples():
    fp = _fp(CandidatePoint(Fraction(6), Fraction(38, 3), Fraction(6), Fraction(1)))
    q = build_quintic(fp, Fraction(1, 8))
    assert q == Polynomial([Fraction(1, 8), 1, 6, Fraction(38, 3), Fraction(47, 8), 1])
    assert q.degree == 5
    assert q.coeff(4) + q.coeff(0) == 6


@given(st.fractions(min_value=0, max_value=6, max_denominator=1000))
def test_build_quintic_structure(eps):
    fp = _fp(CandidatePoint(Fraction(6), Fraction(1), Fraction(2), Fraction(3)))
    if not 0 < eps < 6:
        with pytest.raises(RangeError):
            build_quintic(fp, eps)
        return
    q = build_quintic(fp, eps)
    assert q.degree == 5 and q.lc == 1
    assert q.coeff(4) + q.coeff(0) == 6


def test_epsilon_h_vanishes_at_one():
    # t = 1 is always a root of h, so {h <= 0} is never empty
    for seed in range(50):
        assert evaluate(epsilon_tail(random_stable_sextic(seed)), 1) == 0


def test_epsilon_without_constraints_is_half_x(monkeypatch):
    monkeypatch.setattr(synthesis, "epsilon_bounds", lambda q, g: None)
    fp = _fp(CandidatePoint(Fraction(5), Fraction(1), Fraction(1), Fraction(1)))
    assert epsilon_for(SegmentProblem(ONE6, ONE6), fp) == Fraction(5, 2)


def test_epsilon_quintic_positive_and_halving_robust():
    prob = SegmentProblem(ONE6, ONE6)
    fp = find_feasible_point(prob)
    eps = epsilon_for(prob, fp)
    assert 0 < eps <= fp.point.x / 2
    for e in (eps, eps / 2):
        c = build_quintic(fp, e)
        rep = verify_spr(c, ONE6)
        assert rep.numerator_positive.positive and rep.denominator_hurwitz


def test_epsilon_bound_certifies_positivity(certified_corpus):
    # with eps below M/N, t*g + eps*h stays positive wherever h <= 0
    for prob, cert in certified_corpus[:20]:
        for q, g in ((prob.a, cert.point.g_a), (prob.b, cert.point.g_b)):
            M, N = epsilon_bounds(q, g)
            assert M > 0 and N > 0
            assert cert.epsilon <= M / (2 * N)


def test_lift_clean_instance():
    prob = SegmentProblem(ONE6, ONE6)
    fp = find_feasible_point(prob)
    quintic = build_quintic(fp, epsilon_for(prob, fp))
    c, delta, reports = lift_to_sextic(quintic, prob, DEFAULT_LIFT)
    assert c.degree == 6 and c.lc == delta
    assert delta == Fraction(1, 2 ** (delta.denominator.bit_length() - 1))
    assert all(r.spr for r in reports)
    half = quintic + DEFAULT_LIFT * (delta / 2)
    assert verify_spr(half, ONE6).spr


def test_lift_rejects_bad_direction():
    with pytest.raises(ValueError):
        lift_to_sextic(Polynomial([1, 1]), SegmentProblem(ONE6, ONE6), Polynomial([1, 1]))


def test_lift_exhaustion_is_raised(monkeypatch):
    monkeypatch.setattr(synthesis, "MAX_DELTA_EXPONENT", 8)
    with pytest.raises(LiftExhaustedError):
        lift_to_sextic(Polynomial([-1]), SegmentProblem(ONE6, ONE6), DEFAULT_LIFT)


def test_synthesize_clean_pair():
    prob = SegmentProblem(ONE6, TWO6)
    cert = synthesize(prob)
    assert isinstance(cert, SprCertificate) and cert.certified
    assert cert.verdict == "certified"
    assert all(r.spr for r in cert.reports)
    assert cert.c_tilde == cert.quintic + cert.lift_direction * cert.delta
    x = cert.point.point.x
    assert cert.quintic == Polynomial([cert.epsilon, cert.point.point.p, cert.point.point.z,
                                       cert.point.point.y, x - cert.epsilon, 1])
    assert x - cert.epsilon > 0 and cert.epsilon > 0 and cert.delta > 0


def test_synthesize_custom_direction():
    d = Polynomial([1, 1]) ** 4 * Polynomial([2, 1]) ** 2
    cert = synthesize(SegmentProblem(ONE6, TWO6), d)
    assert cert.lift_direction == d
    assert all(verify_spr(cert.c_tilde, q).spr for q in (ONE6, TWO6))


def test_synthesize_endpoint_refusal():
    coeffs = list(ONE6.coeffs)
    coeffs[3] = -coeffs[3]
    out = synthesize(SegmentProblem(ONE6, Polynomial(coeffs)))
    assert isinstance(out, EndpointUnstableRefusal)
    assert out.which == "b" and out.verdict == "endpoint_unstable"


def test_synthesize_segment_refusal():
    prob = random_unstable_segment(2)
    out = synthesize(prob)
    assert isinstance(out, SegmentUnstableRefusal)
    assert out.verdict == "segment_unstable"
    w = out.witness
    assert abs2_at(combination(prob, w.lam_mid), float(w.omega_mid)) < 1e-6


def test_trace_replays_selection_inequalities(certified_corpus):
    for prob, cert in certified_corpus[:50]:
        steps = {}
        for entry in cert.trace:
            steps.setdefault(entry["step"], []).append(entry)
        eps = Fraction(steps["epsilon"][0]["value"])
        assert eps <= Fraction(steps["epsilon"][0]["x_half"])
        for b in steps["epsilon_bound"]:
            if b.get("constraint", "") is None:
                continue
            M, N = Fraction(b["M"]), Fraction(b["N"])
            assert M > 0 and N > 0
            assert Fraction(b["bound"]) == M / (2 * N)
            assert eps <= M / (2 * N)
        final_eps = Fraction(steps["epsilon_halved"][0]["value"]) if "epsilon_halved" in steps else eps
        assert final_eps == cert.epsilon <= eps
        delta = steps["delta"][0]
        assert Fraction(delta["value"]) == cert.delta == Fraction(1, 2 ** delta["exponent"])
        if delta["exponent"] > 0:
            # the previous (doubled) delta was rejected
            assert not all(verify_spr(cert.quintic + DEFAULT_LIFT * (2 * cert.delta), q).spr
                           for q in (prob.a, prob.b))


def test_tangent_plane_residual_examples():
    assert tangent_plane_residual(ONE6, 0, 0) == 0
    assert tangent_plane_residual(ONE6, 1, 1) == 8


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.fractions(max_denominator=50, min_value=-10, max_value=10),
       st.fractions(max_denominator=50, min_value=-10, max_value=10),
       st.fractions(min_value=0, max_value=1, max_denominator=64))
def test_tangent_plane_residual_affine_in_lambda(seed, u, v, lam):
    prob = SegmentProblem(random_stable_sextic(seed), random_stable_sextic(seed + 7))
    lhs = tangent_plane_residual(combination(prob, lam), u, v)
    rhs = (1 - lam) * tangent_plane_residual(prob.a, u, v) + lam * tangent_plane_residual(prob.b, u, v)
    assert lhs == rhs


def test_convexity_of_result(certified_corpus):
    for prob, cert in certified_corpus[:10]:
        for k in range(17):
            assert verify_spr(cert.c_tilde, combination(prob, Fraction(k, 16))).spr
