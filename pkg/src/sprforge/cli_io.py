"""Command line interface and wire formats.

Exit codes: 0 certified/stable, 2 principled refusal (unstable endpoint or
segment), 1 usage/parse/internal error, 3 certificate rejected by ``verify``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .geometry import DegenerateDenominatorError, NotHurwitzError, conic_region, sample_ellipse, tangency_points
from .poly_core import Polynomial, routh_hurwitz
from .spr import verify_spr
from .stability import SegmentProblem, random_stable_segment, segment_stable
from .synthesis import (
    DEFAULT_LIFT,
    EndpointUnstableRefusal,
    SegmentUnstableRefusal,
    SprCertificate,
    synthesize,
)

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUSED = 2
EXIT_REJECTED = 3

log = logging.getLogger("sprforge")


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# wire format


def parse_scalar(text, where: str = "") -> Fraction:
    """Exact rational from "38/3", "-2", "0.125" or "1e-3" (ints accepted too)."""
    if isinstance(text, bool):
        raise ParseError(f"{where}: boolean is not a coefficient")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        # JSON numbers: go through the shortest repr so 0.1 means 1/10
        text = repr(text)
    if not isinstance(text, str):
        raise ParseError(f"{where}: expected a coefficient string, got {type(text).__name__}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: cannot parse {text!r} as a rational") from exc


def render(v: Fraction) -> str:
    return str(Fraction(v))


def parse_coeffs(values, where: str, monic_sextic: bool = True) -> Polynomial:
    if isinstance(values, str):
        values = [v for v in values.replace(";", ",").split(",") if v.strip()]
    if not isinstance(values, (list, tuple)):
        raise ParseError(f"{where}: expected a list of coefficients")
    if monic_sextic and len(values) != 7:
        raise ParseError(f"{where}: expected 7 coefficients (descending powers), got {len(values)}")
    coeffs = [parse_scalar(v, f"{where}[{i}]") for i, v in enumerate(values)]
    if monic_sextic and coeffs[0] != 1:
        raise ParseError(f"{where}[0]: leading coefficient must be 1, got {coeffs[0]}")
    return Polynomial.from_descending(coeffs)


def render_coeffs(p: Polynomial, length: Optional[int] = None) -> list:
    desc = p.descending()
    if length is not None:
        desc = [Fraction(0)] * (length - len(desc)) + desc
    return [render(c) for c in desc]


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return doc


def parse_problem(doc: dict, where: str = "problem") -> tuple:
    """ProblemDocument -> (SegmentProblem, d or None, seed or None)."""
    for key in ("a", "b"):
        if key not in doc:
            raise ParseError(f"{where}: missing field {key!r}")
    a = parse_coeffs(doc["a"], f"{where}.a")
    b = parse_coeffs(doc["b"], f"{where}.b")
    d = parse_coeffs(doc["d"], f"{where}.d") if doc.get("d") is not None else None
    seed = doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ParseError(f"{where}.seed: expected an integer")
    return SegmentProblem(a, b), d, seed


def problem_document(prob: SegmentProblem, d=None, seed=None) -> dict:
    doc = {"a": render_coeffs(prob.a), "b": render_coeffs(prob.b)}
    if d is not None:
        doc["d"] = render_coeffs(d)
    if seed is not None:
        doc["seed"] = seed
    return doc


def _interval(iv) -> list:
    return [render(iv[0]), render(iv[1])]


def certificate_document(result, prob: SegmentProblem, d: Optional[Polynomial],
                         timing_ms: Optional[float]) -> dict:
    d = DEFAULT_LIFT if d is None else d
    doc = {
        "schema_version": SCHEMA_VERSION,
        "verdict": result.verdict,
        "a": render_coeffs(prob.a),
        "b": render_coeffs(prob.b),
        "d": render_coeffs(d),
        "point": None,
        "epsilon": None,
        "delta": None,
        "quintic": None,
        "c_tilde": None,
        "reports": None,
        "witness": None,
        "trace": [],
        "timing_ms": timing_ms,
    }
    if isinstance(result, SprCertificate):
        pt = result.point.point
        doc.update(
            point={k: render(v) for k, v in zip("xyzp", pt)},
            epsilon=render(result.epsilon),
            delta=render(result.delta),
            quintic=render_coeffs(result.quintic),
            c_tilde=render_coeffs(result.c_tilde),
            reports={"a": result.reports[0].to_dict(), "b": result.reports[1].to_dict()},
            trace=result.trace,
        )
    elif isinstance(result, SegmentUnstableRefusal):
        w = result.witness
        doc["witness"] = None if w is None else {
            "lambda": _interval(w.lam),
            "omega": _interval(w.omega),
        }
    elif isinstance(result, EndpointUnstableRefusal):
        doc["witness"] = {"which": result.which}
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def reverify_document(doc: dict) -> tuple:
    """Re-check a certified document from its serialized values alone.

    Returns (ok, reasons). Raises ParseError for malformed documents.
    """
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc.get('schema_version')!r}")
    if doc.get("verdict") != "certified":
        raise ParseError(f"verdict is {doc.get('verdict')!r}, not 'certified'")
    prob, d, _ = parse_problem(doc, "certificate")
    if d is None:
        raise ParseError("certificate: missing field 'd'")
    try:
        c = parse_coeffs(doc["c_tilde"], "certificate.c_tilde", monic_sextic=False)
        quintic = parse_coeffs(doc["quintic"], "certificate.quintic", monic_sextic=False)
        eps = parse_scalar(doc["epsilon"], "certificate.epsilon")
        delta = parse_scalar(doc["delta"], "certificate.delta")
        pt = [parse_scalar(doc["point"][k], f"certificate.point.{k}") for k in "xyzp"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"certificate: missing or malformed field {exc}") from exc
    reasons = []
    for name, q in (("a", prob.a), ("b", prob.b)):
        rep = verify_spr(c, q)
        if not rep.spr:
            reasons.append(
                f"c_tilde/{name} is not SPR: degree_ok={rep.degree_ok} "
                f"denominator_hurwitz={rep.denominator_hurwitz} "
                f"real part {rep.numerator_positive}"
            )
    x, y, z, p = pt
    expected_quintic = Polynomial([eps, p, z, y, x - eps, 1])
    if not (eps > 0 and delta > 0 and x - eps > 0):
        reasons.append("epsilon/delta bounds violated")
    if quintic != expected_quintic:
        reasons.append("quintic does not match point and epsilon")
    if c != quintic + d * delta:
        reasons.append("c_tilde != quintic + delta*d")
    return not reasons, reasons


# ---------------------------------------------------------------------------
# commands


def _problem_from_args(args) -> tuple:
    if args.path:
        return parse_problem(_load_json(args.path), str(args.path))
    if args.a is None or args.b is None:
        raise ParseError("give a problem file or both --a and --b")
    return SegmentProblem(parse_coeffs(args.a, "--a"), parse_coeffs(args.b, "--b")), None, None


def _float_segment_check(prob: SegmentProblem) -> tuple:
    fa, fb = prob.a.to_float(), prob.b.to_float()
    ends = [routh_hurwitz(fa).stable, routh_hurwitz(fb).stable]
    grid_ok = all(ends)
    if grid_ok:
        for k in range(1001):
            lam = k / 1000
            if not routh_hurwitz(fa * (1 - lam) + fb * lam).stable:
                grid_ok = False
                break
    return ends, grid_ok


def cmd_check(args) -> int:
    prob, _, _ = _problem_from_args(args)
    if args.mode == "float":
        ends, seg = _float_segment_check(prob)
        print(f"endpoint a: {'Hurwitz' if ends[0] else 'NOT Hurwitz'} (float)")
        print(f"endpoint b: {'Hurwitz' if ends[1] else 'NOT Hurwitz'} (float)")
        print(f"segment (1001-point float grid): {'stable' if seg else 'unstable'}")
        return EXIT_OK if seg else EXIT_REFUSED
    verdict = segment_stable(prob)
    for name, rep in zip("ab", verdict.endpoint_reports):
        print(f"endpoint {name}: {'Hurwitz' if rep.stable else 'NOT Hurwitz'}")
    if verdict.stable:
        print("segment: stable")
        return EXIT_OK
    w = verdict.crossing_witness
    if w is not None:
        print(f"segment: unstable, crossing at lambda in [{float(w.lam[0]):.17g}, "
              f"{float(w.lam[1]):.17g}], omega in [{float(w.omega[0]):.17g}, {float(w.omega[1]):.17g}]")
    else:
        print(f"segment: unstable (endpoint {verdict.unstable_endpoint} not Hurwitz)")
    return EXIT_REFUSED


def _refuse_float(args, what: str):
    if getattr(args, "mode", "rational") == "float":
        raise ParseError(f"--mode float cannot {what}; certificates are exact")


def emit_curve(path, c: Polynomial, prob: SegmentProblem, points: int = 1000):
    omega = np.logspace(-4, 4, points)
    jw = 1j * omega
    cv = np.polyval([float(v) for v in c.descending()], jw)
    rows = []
    for q in (prob.a, prob.b):
        rows.append(np.real(cv / np.polyval([float(v) for v in q.descending()], jw)))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega", "re_a", "re_b"])
        for om, ra, rb in zip(omega, rows[0], rows[1]):
            w.writerow([f"{om:.17g}", f"{ra:.17g}", f"{rb:.17g}"])
    return rows


def cmd_synthesize(args) -> int:
    _refuse_float(args, "emit certificates")
    prob, d, _ = parse_problem(_load_json(args.path), str(args.path))
    if args.d is not None:
        d = parse_coeffs(args.d, "--d")
    d = DEFAULT_LIFT if d is None else d
    t0 = time.perf_counter()
    result = synthesize(prob, d)
    timing = (time.perf_counter() - t0) * 1000
    doc = certificate_document(result, prob, d, round(timing, 3))
    text = dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if isinstance(result, SprCertificate):
        if args.emit_curve:
            emit_curve(args.emit_curve, result.c_tilde, prob)
        print(f"certified: c_tilde degree {result.c_tilde.degree}, "
              f"epsilon={result.epsilon}, delta={result.delta}", file=sys.stderr)
        return EXIT_OK
    print(f"refused: {result.verdict}", file=sys.stderr)
    return EXIT_REFUSED


def cmd_verify(args) -> int:
    _refuse_float(args, "verify certificates")
    doc = _load_json(args.cert)
    ok, reasons = reverify_document(doc)
    if ok:
        print("certificate verified: both ratios are strictly positive real")
        return EXIT_OK
    for r in reasons:
        print(f"rejected: {r}")
    return EXIT_REJECTED


def _batch_instance(task) -> dict:
    index, seed = task
    prob = random_stable_segment(seed)
    t0 = time.perf_counter()
    try:
        result = synthesize(prob)
        error = None
    except Exception as exc:  # recorded per instance, batch continues
        result, error = None, f"{type(exc).__name__}: {exc}"
    elapsed = (time.perf_counter() - t0) * 1000
    if result is None:
        doc = {"schema_version": SCHEMA_VERSION, "verdict": "error", "error": error,
               **problem_document(prob), "timing_ms": None}
    else:
        doc = certificate_document(result, prob, None, None)
    return {"index": index, "seed": seed, "doc": doc, "elapsed_ms": elapsed}


def _stats(values: list) -> Optional[dict]:
    if not values:
        return None
    return {"min": min(values), "median": statistics.median(values), "max": max(values)}


def cmd_batch(args) -> int:
    _refuse_float(args, "emit certificates")
    if args.count < 1:
        raise ParseError("--count must be >= 1")
    out = Path(args.out)
    (out / "certificates").mkdir(parents=True, exist_ok=True)
    tasks = [(i, args.seed * 1_000_003 + i) for i in range(args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_batch_instance, tasks, chunksize=8))
    else:
        results = [_batch_instance(t) for t in tasks]
    results.sort(key=lambda r: r["index"])
    failures, eps_log2, delta_log2, margins = [], [], [], []
    for r in results:
        doc = r["doc"]
        (out / "certificates" / f"instance_{r['index']:04d}.json").write_text(dumps(doc))
        if doc["verdict"] != "certified":
            failures.append({"index": r["index"], "verdict": doc["verdict"],
                             "error": doc.get("error")})
            continue
        eps_log2.append(float(np.log2(float(Fraction(doc["epsilon"])))))
        delta_log2.append(float(np.log2(float(Fraction(doc["delta"])))))
        margins.append(min(doc["reports"]["a"]["margin"], doc["reports"]["b"]["margin"]))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "count": args.count,
        "seed": args.seed,
        "certified": args.count - len(failures),
        "failures": failures,
        "epsilon_log2": _stats(eps_log2),
        "delta_log2": _stats(delta_log2),
        "margin": _stats(margins),
    }
    (out / "summary.json").write_text(dumps(summary))
    times = [r["elapsed_ms"] for r in results]
    timing = {"median_ms": statistics.median(times), "max_ms": max(times),
              "total_ms": sum(times), "per_instance_ms": times}
    (out / "timing.json").write_text(dumps(timing))
    print(f"{'instances':<12}{args.count}")
    print(f"{'certified':<12}{summary['certified']}")
    print(f"{'failed':<12}{len(failures)}")
    if eps_log2:
        print(f"{'log2 eps':<12}min {min(eps_log2):.1f}  median {statistics.median(eps_log2):.1f}")
        print(f"{'log2 delta':<12}min {min(delta_log2):.1f}  median {statistics.median(delta_log2):.1f}")
    print(f"{'median ms':<12}{timing['median_ms']:.1f}")
    return EXIT_OK if not failures else EXIT_ERROR


def _fmt_row(kind, index, pt) -> list:
    return [kind, index] + [render(v) for v in pt] + [f"{float(v):.17g}" for v in pt]


def cmd_geometry(args) -> int:
    _refuse_float(args, "emit exact geometry")
    prob, _, _ = parse_problem(_load_json(args.path), str(args.path))
    q = prob.b if args.endpoint == "b" else prob.a
    if args.index not in (1, 2, 3):
        raise ParseError(f"--index must be 1, 2 or 3, got {args.index}")
    region = conic_region(q, args.index)
    pair = tangency_points(q, args.index)
    rows = [_fmt_row("tangency_first", args.index, pair.first),
            _fmt_row("tangency_second", args.index, pair.second)]
    for k, pt in enumerate(sample_ellipse(region, args.samples)):
        rows.append(_fmt_row(f"sample_{k}", args.index, pt))
    for pt in [pair.first, pair.second] + sample_ellipse(region, args.samples):
        if not pt.is_positive():
            print(f"error: point {pt} is not in the first quadrant", file=sys.stderr)
            return EXIT_ERROR
    header = ["kind", "index", "x", "y", "z", "p", "x_float", "y_float", "z_float", "p_float"]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)
    print(f"region {args.index}: discriminant {float(region.discriminant):.6g} "
          f"({'ellipse' if region.is_ellipse else 'not an ellipse'})", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sprforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def mode(p):
        p.add_argument("--mode", choices=("rational", "float"), default="rational")

    p = sub.add_parser("check", help="endpoint and segment Hurwitz verdicts")
    p.add_argument("path", nargs="?")
    p.add_argument("--a", help="7 comma-separated coefficients, descending powers")
    p.add_argument("--b")
    mode(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize", help="build and certify c_tilde")
    p.add_argument("path")
    p.add_argument("--d", help="lift direction, 7 coefficients (default (s+1)^6)")
    p.add_argument("--emit-curve", dest="emit_curve")
    p.add_argument("--out")
    mode(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="re-verify a certificate document")
    p.add_argument("cert")
    mode(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("batch", help="synthesize random stable segments")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    mode(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("geometry", help="tangency points and ellipse samples as CSV")
    p.add_argument("path")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--endpoint", choices=("a", "b"), default="a")
    p.add_argument("--out")
    mode(p)
    p.set_defaults(func=cmd_geometry)
    return parser


def _configure_logging():
    level = os.environ.get("SPRFORGE_LOG", "error").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DegenerateDenominatorError, NotHurwitzError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # internal failure
        log.exception("internal error")
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
