import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from sprforge.cli_io import (
    ParseError,
    certificate_document,
    main,
    parse_coeffs,
    parse_problem,
    parse_scalar,
    problem_document,
    reverify_document,
)
from sprforge.stability import SegmentProblem, random_unstable_segment

from conftest import ONE6, TWO6

CLEAN = {"a": ["1", "6", "15", "20", "15", "6", "1"], "b": ["1", "12", "60", "160", "240", "192", "64"]}


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def test_scalar_parsing_is_exact():
    assert parse_scalar("38/3") == Fraction(38, 3)
    assert parse_scalar("0.1") == Fraction(1, 10)
    assert parse_scalar("1e-3") == Fraction(1, 1000)
    assert parse_scalar(0.1) == Fraction(1, 10)
    assert parse_scalar(-2) == -2
    with pytest.raises(ParseError):
        parse_scalar("abc", "a[0]")
    with pytest.raises(ParseError):
        parse_scalar(True)


def test_coefficient_list_validation():
    assert parse_coeffs(CLEAN["a"], "a") == ONE6
    with pytest.raises(ParseError, match="7 coefficients"):
        parse_coeffs(CLEAN["a"][:-1], "a")
    with pytest.raises(ParseError, match="leading"):
        parse_coeffs(["2"] + CLEAN["a"][1:], "a")
    assert parse_coeffs("1,6,15,20,15,6,1", "--a") == ONE6


def test_problem_round_trip():
    prob = SegmentProblem(ONE6, TWO6)
    again, d, seed = parse_problem(problem_document(prob, d=ONE6, seed=3))
    assert again == prob and d == ONE6 and seed == 3
    with pytest.raises(ParseError, match="missing"):
        parse_problem({"a": CLEAN["a"]})


def test_check_stable(tmp_path, capsys):
    assert main(["check", _write(tmp_path, "p.json", {"a": CLEAN["a"], "b": CLEAN["a"]})]) == 0
    assert "segment: stable" in capsys.readouterr().out


def test_check_unstable_endpoint_named(tmp_path, capsys):
    doc = {"a": CLEAN["a"], "b": ["1", "6", "15", "-20", "15", "6", "1"]}
    assert main(["check", _write(tmp_path, "p.json", doc)]) == 2
    assert "endpoint b: NOT Hurwitz" in capsys.readouterr().out


def test_check_malformed(tmp_path, capsys):
    doc = {"a": CLEAN["a"][:6], "b": CLEAN["b"]}
    assert main(["check", _write(tmp_path, "p.json", doc)]) == 1
    assert "a: expected 7" in capsys.readouterr().err


def test_check_json_error_has_position(tmp_path, capsys):
    assert main(["check", _write(tmp_path, "p.json", '{"a": [\n  "1",\n')]) == 1
    assert "line" in capsys.readouterr().err


def test_check_inline_and_float_mode(capsys):
    args = ["check", "--a", "1,6,15,20,15,6,1", "--b", "1,12,60,160,240,192,64"]
    assert main(args) == 0
    assert main(args + ["--mode", "float"]) == 0
    assert "float" in capsys.readouterr().out
    assert main(["check", "--a", "1,6,15,20,15,6,1"]) == 1


def test_check_crossing(tmp_path, capsys):
    prob = random_unstable_segment(1)
    assert main(["check", _write(tmp_path, "p.json", problem_document(prob))]) == 2
    assert "crossing at lambda" in capsys.readouterr().out


def test_synthesize_verify_and_curve(tmp_path):
    out, curve = tmp_path / "cert.json", tmp_path / "curve.csv"
    code = main(["synthesize", _write(tmp_path, "p.json", CLEAN), "--out", str(out), "--emit-curve", str(curve)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == "1" and doc["verdict"] == "certified"
    assert doc["d"] == CLEAN["a"]  # default (s+1)^6 recorded
    with open(curve) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["omega", "re_a", "re_b"] and len(rows) == 1001
    assert all(float(r[1]) > 0 and float(r[2]) > 0 for r in rows[1:])
    assert main(["verify", str(out)]) == 0


def test_synthesize_with_direction(tmp_path):
    out = tmp_path / "cert.json"
    d = "1,7,21,35,35,21,7"
    assert main(["synthesize", _write(tmp_path, "p.json", CLEAN), "--d", d, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["d"] == d.split(",")


def test_synthesize_refusal_writes_witness(tmp_path):
    out = tmp_path / "cert.json"
    path = _write(tmp_path, "p.json", problem_document(random_unstable_segment(3)))
    assert main(["synthesize", path, "--out", str(out)]) == 2
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "segment_unstable"
    lam = [Fraction(v) for v in doc["witness"]["lambda"]]
    omega = [Fraction(v) for v in doc["witness"]["omega"]]
    assert 0 <= lam[0] <= lam[1] <= 1 and 0 < omega[0] <= omega[1]


def test_float_mode_refuses_certificates(tmp_path):
    path = _write(tmp_path, "p.json", CLEAN)
    assert main(["synthesize", path, "--mode", "float"]) == 1
    assert main(["batch", "--count", "1", "--out", str(tmp_path / "b"), "--mode", "float"]) == 1


def test_verify_rejects_perturbed_certificate(tmp_path, capsys):
    out = tmp_path / "cert.json"
    main(["synthesize", _write(tmp_path, "p.json", CLEAN), "--out", str(out)])
    doc = json.loads(out.read_text())
    rejected = False
    for k in range(1, 7):
        bad = json.loads(json.dumps(doc))
        bad["c_tilde"][k] = str(Fraction(bad["c_tilde"][k]) * Fraction(11, 10))
        if main(["verify", _write(tmp_path, "bad.json", bad)]) == 3:
            rejected = True
            break
    assert rejected
    assert "rejected" in capsys.readouterr().out


def test_verify_structural_mismatch(tmp_path):
    out = tmp_path / "cert.json"
    main(["synthesize", _write(tmp_path, "p.json", CLEAN), "--out", str(out)])
    doc = json.loads(out.read_text())
    doc["delta"] = str(Fraction(doc["delta"]) / 2)
    assert main(["verify", _write(tmp_path, "bad.json", doc)]) == 3


def test_verify_truncated_and_refusal(tmp_path):
    out = tmp_path / "cert.json"
    main(["synthesize", _write(tmp_path, "p.json", CLEAN), "--out", str(out)])
    text = out.read_text()
    assert main(["verify", _write(tmp_path, "trunc.json", text[: len(text) // 2])]) == 1
    assert main(["verify", str(tmp_path / "missing.json")]) == 1
    refusal = tmp_path / "ref.json"
    main(["synthesize", _write(tmp_path, "u.json", problem_document(random_unstable_segment(3))),
          "--out", str(refusal)])
    assert main(["verify", str(refusal)]) == 1


def test_certificate_round_trip(certified_corpus):
    for prob, cert in certified_corpus:
        doc = json.loads(json.dumps(certificate_document(cert, prob, None, None)))
        ok, reasons = reverify_document(doc)
        assert ok, reasons
        assert parse_coeffs(doc["c_tilde"], "c", monic_sextic=False) == cert.c_tilde


def test_batch_deterministic(tmp_path, capsys):
    runs = []
    for name in ("r1", "r2"):
        assert main(["batch", "--count", "6", "--seed", "5", "--out", str(tmp_path / name)]) == 0
        runs.append(tmp_path / name)
    assert (runs[0] / "summary.json").read_bytes() == (runs[1] / "summary.json").read_bytes()
    for k in range(6):
        rel = f"certificates/instance_{k:04d}.json"
        assert (runs[0] / rel).read_bytes() == (runs[1] / rel).read_bytes()
    summary = json.loads((runs[0] / "summary.json").read_text())
    assert summary["certified"] == 6 and summary["failures"] == []
    assert "median ms" in capsys.readouterr().out


def test_batch_workers_match_serial(tmp_path):
    main(["batch", "--count", "4", "--seed", "9", "--out", str(tmp_path / "s")])
    main(["batch", "--count", "4", "--seed", "9", "--out", str(tmp_path / "w"), "--workers", "2"])
    assert (tmp_path / "s" / "summary.json").read_bytes() == (tmp_path / "w" / "summary.json").read_bytes()


def test_batch_zero_count(tmp_path):
    assert main(["batch", "--count", "0", "--out", str(tmp_path / "b")]) == 1


def test_geometry_csv(tmp_path):
    out = tmp_path / "g.csv"
    path = _write(tmp_path, "p.json", CLEAN)
    assert main(["geometry", path, "--index", "1", "--samples", "4", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    first = rows[0]
    assert first["kind"] == "tangency_first"
    assert (first["x"], first["y"], first["z"], first["p"]) == ("6", "38/3", "6", "1")
    assert first["y_float"] == "12.666666666666666"
    for r in rows:
        assert all(Fraction(r[k]) > 0 for k in "xyzp")


def test_geometry_bad_index(tmp_path):
    assert main(["geometry", _write(tmp_path, "p.json", CLEAN), "--index", "4"]) == 1


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["batch", "--out", "x"])
    assert exc.value.code == 1


def test_module_entry_point(tmp_path):
    path = _write(tmp_path, "p.json", CLEAN)
    res = subprocess.run([sys.executable, "-m", "sprforge", "check", path], capture_output=True, text=True)
    assert res.returncode == 0 and "segment: stable" in res.stdout
