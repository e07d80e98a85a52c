"""Exact synthesis of a common strictly positive real numerator for a stable
segment of monic sextic polynomials."""

from .poly_core import Polynomial, routh_hurwitz, is_hurwitz, sturm_chain, count_roots, isolate_real_roots
from .stability import SegmentProblem, segment_stable, combination, random_stable_segment
from .spr import CandidatePoint, verify_spr, real_part_numerator, g_coefficients, epsilon_tail
from .geometry import conic_region, tangency_points, sample_ellipse
from .synthesis import synthesize, SprCertificate, SegmentUnstableRefusal, EndpointUnstableRefusal

__version__ = "0.1.0"

__all__ = [
    "Polynomial", "routh_hurwitz", "is_hurwitz", "sturm_chain", "count_roots", "isolate_real_roots",
    "SegmentProblem", "segment_stable", "combination", "random_stable_segment",
    "CandidatePoint", "verify_spr", "real_part_numerator", "g_coefficients", "epsilon_tail",
    "conic_region", "tangency_points", "sample_ellipse",
    "synthesize", "SprCertificate", "SegmentUnstableRefusal", "EndpointUnstableRefusal",
]
