#!/usr/bin/env python3
"""
End-to-end tests for the command-line front end: golden outputs, b-file
round trips and the 0/1/2 exit-code contract.
"""

import json
from pathlib import Path

import pytest
import yaml

import identities
from bfile import BFileCache, format_bfile, parse_bfile, read_bfile
from main import load_config, main, parse_range
from recurrences import terms
from router import doubling_schedule
from transform import TransformParams, iterated_lucas_spec

SAMPLES = Path(__file__).with_name("test_samples")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("argv, golden", [
    (["emit", "--family", "k-lucas", "--k", "1", "--r", "1", "--count", "5", "--format", "plain"],
     "emit_lucas_k1_r1_plain.golden"),
    (["emit", "--family", "k-lucas", "--k", "1", "--r", "0", "--count", "5", "--format", "bfile"],
     "emit_lucas_k1_r0_bfile.golden"),
    (["emit", "--family", "k-fibonacci", "--k", "1", "--r", "2", "--count", "4", "--format", "csv"],
     "emit_fibonacci_k1_r2_csv.golden"),
])
def test_emit_golden(capsys, argv, golden):
    for method in ("iterate", "matrix"):
        code, out, _ = run(capsys, *argv, "--method", method)
        assert code == 0
        assert out == (SAMPLES / golden).read_text()


def test_emit_methods_agree_byte_for_byte(capsys):
    for family in ("k-lucas", "k-fibonacci"):
        for fmt in ("plain", "csv", "json", "bfile"):
            base = ["emit", "--family", family, "--k", "3", "--r", "2", "--count", "40", "--format", fmt]
            _, iterated, _ = run(capsys, *base, "--method", "iterate")
            _, powered, _ = run(capsys, *base, "--method", "matrix")
            assert iterated == powered


def test_emit_json(capsys):
    code, out, _ = run(capsys, "emit", "--family", "pell", "--count", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc == {"family": "k-fibonacci", "k": 2, "r": 0, "terms": ["0", "1", "2", "5", "12"]}


def test_emit_zero_count(capsys):
    assert run(capsys, "emit", "--family", "lucas", "--count", "0", "--format", "bfile")[1] == ""
    assert run(capsys, "emit", "--family", "lucas", "--count", "0")[1] == "\n"


@pytest.mark.parametrize("preset, expected", [
    ("lucas", "2 1 3 4 7 11 18\n"),
    ("pell-lucas", "2 2 6 14 34 82 198\n"),
    ("fibonacci", "0 1 1 2 3 5 8\n"),
    ("pell", "0 1 2 5 12 29 70\n"),
])
def test_presets(capsys, preset, expected):
    code, out, _ = run(capsys, "emit", "--family", preset, "--count", "7")
    assert code == 0
    assert out == expected


def test_preset_with_conflicting_k(capsys):
    code, _, err = run(capsys, "emit", "--family", "lucas", "--k", "2", "--count", "3")
    assert code == 2
    assert "fixes k=1" in err


@pytest.mark.parametrize("extra, expected", [
    (["--n", "10"], "15127\n"),
    (["--n", "0"], "2\n"),
    (["--n", "10", "--mod", "100"], "27\n"),
    (["--n", "10", "--mod", "100", "--method", "iterate"], "27\n"),
])
def test_term(capsys, extra, expected):
    code, out, _ = run(capsys, "term", "--family", "k-lucas", "--k", "1", "--r", "1", *extra)
    assert code == 0
    assert out == expected


@pytest.mark.parametrize("argv", [
    ["emit", "--family", "k-lucas", "--k", "0", "--count", "5"],
    ["emit", "--family", "k-lucas", "--k", "1", "--count", "-1"],
    ["emit", "--family", "k-lucas", "--k", "1", "--count", "5", "--format", "xml"],
    ["emit", "--family", "k-lucas", "--count", "5"],
    ["emit", "--family", "k-lucas", "--k", "1", "--r", "-1", "--count", "5"],
    ["term", "--family", "k-lucas", "--k", "1", "--n", "4", "--mod", "1"],
    ["term", "--family", "k-lucas", "--k", "1", "--n", "-4"],
    ["verify", "--identity", "nonsense"],
    ["verify", "--identity", "sum", "--k-range", "3..1"],
    ["verify", "--identity", "sum", "--k-range", "one"],
    ["bench", "--family", "k-lucas", "--k", "0", "--n-max", "16"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_verify_exit_0(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "sum", "--k-range", "1..3", "--r-range", "0..3",
                       "--n-max", "32")
    assert code == 0
    assert "failed: 0" in out.splitlines()
    assert out.splitlines()[-1] == "status: VERIFIED"

    code, _, _ = run(capsys, "verify", "--identity", "oracle-lucas", "--k-range", "1..1", "--r-range", "0..0",
                     "--n-max", "4")
    assert code == 0


def test_verify_accepts_negative_k_range(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "oracle-lucas", "--k-range", "-3..3", "--r-range", "0..1",
                       "--n-max", "4")
    assert code == 0
    assert "passed: 60" in out.splitlines()

    code, _, _ = run(capsys, "verify", "--identity", "oracle-lucas", "--k-range", "-3", "--n-max", "4")
    assert code == 0


@pytest.mark.parametrize("extra", [
    ["--k-range", "0..0"],
    ["--r-range", "-1..2"],
])
def test_verify_rejects_grids_without_cells(capsys, extra):
    code, out, err = run(capsys, "verify", "--identity", "sum", "--n-max", "4", *extra)
    assert code == 2
    assert out == ""
    assert "Error" in err


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "binet", "--k-range", "1..2", "--r-range", "0..1",
                       "--n-max", "10", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["identity"] == "binet"
    assert doc["passed"] == str(2 * 2 * 11)
    assert doc["failed"] == "0"
    assert doc["skipped"] == "0"
    assert doc["grid"] == {"k_min": "1", "k_max": "2", "r_min": "0", "r_max": "1", "n_max": "10"}


def test_verify_exit_1_on_counterexample(capsys, monkeypatch):
    monkeypatch.setattr(identities, "b2_closed_form", lambda p: p.k * p.k + 2 * p.r * p.k + 3 * p.r * p.r + 2)
    code, out, _ = run(capsys, "verify", "--identity", "b2-closed-form", "--k-range", "1..2",
                       "--r-range", "0..2", "--n-max", "2", "--json")
    assert code == 1
    ce = json.loads(out)["first_counterexample"]
    assert ce == {"k": "1", "r": "1", "n": "2", "expected": "7", "actual": "8"}


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--family", "k-lucas", "--k", "1", "--r", "1", "--n-max", "256",
                       "--method", "both", "--repeats", "1")
    assert code == 0
    rows = out.splitlines()[3:]
    assert [int(row.split()[0]) for row in rows] == doubling_schedule(256)
    assert all(row.split()[-1] == "ok" for row in rows)


def test_bench_trivial_and_modular(capsys):
    code, out, _ = run(capsys, "bench", "--family", "lucas", "--n-max", "0", "--repeats", "1")
    assert code == 0
    assert len(out.splitlines()) == 4

    code, out, _ = run(capsys, "bench", "--family", "pell", "--r", "2", "--n-max", "1000", "--mod", "97",
                       "--method", "matrix", "--repeats", "1")
    assert code == 0
    assert "mod 97" in out.splitlines()[0]


def test_bench_exit_1_when_methods_disagree(capsys, monkeypatch):
    import router
    monkeypatch.setattr(router, "term_at", lambda spec, n: -1)
    code, out, _ = run(capsys, "bench", "--family", "lucas", "--n-max", "8", "--repeats", "1")
    assert code == 1
    assert out.startswith("methods disagree at n=1")


def test_doubling_schedule():
    assert doubling_schedule(0) == [0]
    assert doubling_schedule(1) == [1]
    assert doubling_schedule(8) == [1, 2, 4, 8]
    assert doubling_schedule(10) == [1, 2, 4, 8, 10]


def test_bfile_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "emit", "--family", "k-lucas", "--k", "4", "--r", "3", "--count", "50",
                       "--format", "bfile")
    assert code == 0
    assert parse_bfile(out) == terms(iterated_lucas_spec(TransformParams(k=4, r=3)), 50)
    assert out.endswith("\n") and "\r" not in out

    path = tmp_path / "b.txt"
    path.write_text(out)
    assert read_bfile(path) == parse_bfile(out)


@pytest.mark.parametrize("text", ["0 2\n2 3\n", "0 2 5\n", "0 x\n"])
def test_parse_bfile_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_bfile(text)


def test_parse_bfile_skips_comments():
    assert parse_bfile("# header\n\n0 5\n1 -3\n") == [5, -3]
    assert format_bfile([5, -3]) == "0 5\n1 -3\n"


def test_check_command(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "--family", "pell-lucas", "--bfile", str(SAMPLES / "pell_lucas.txt"))
    assert code == 0
    assert out.startswith("ok: 8 terms")

    bad = tmp_path / "bad.txt"
    bad.write_text("0 2\n1 2\n2 7\n")
    code, out, _ = run(capsys, "check", "--family", "pell-lucas", "--bfile", str(bad))
    assert code == 1
    assert out == "mismatch at n=2: expected 6, found 7\n"


def test_check_by_name_uses_configured_folder(capsys, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text(yaml.safe_dump({"folders": {"bfiles": str(SAMPLES)}}))
    code, out, _ = run(capsys, "--config", str(config), "check", "--family", "k-lucas", "--k", "2",
                       "--name", "pell_lucas")
    assert code == 0

    code, _, err = run(capsys, "--config", str(config), "check", "--family", "k-lucas", "--k", "2",
                       "--name", "missing")
    assert code == 2
    assert "not found" in err


def test_bfile_cache_skips_non_bfiles(tmp_path):
    (tmp_path / "good.txt").write_text("0 1\n1 1\n")
    (tmp_path / "bad.txt").write_text("not a b-file\n")
    cache = BFileCache(str(tmp_path))
    assert cache.names() == ["good"]
    assert cache.get("good") == [1, 1]
    assert BFileCache(str(tmp_path / "absent")).names() == []


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "  - pell-lucas: k-lucas k=2" in out.splitlines()
    assert "  - specialize-r1" in out.splitlines()


def test_config_env_expansion(tmp_path, monkeypatch):
    config = tmp_path / "config.yaml"
    config.write_text("logging:\n  file: \"${KB_TEST_LOG}\"\n  level: INFO\n")
    monkeypatch.setenv("KB_TEST_LOG", "run.log")
    assert load_config(str(config))["logging"] == {"file": "run.log", "level": "INFO"}
    monkeypatch.delenv("KB_TEST_LOG")
    assert load_config(str(config))["logging"]["file"] is None


def test_missing_config_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "--config", str(tmp_path / "nope.yaml"), "list")
    assert code == 2
    assert "config" in err


def test_parse_range():
    assert parse_range("1..3") == range(1, 4)
    assert parse_range("-2..2") == range(-2, 3)
    assert parse_range("5") == range(5, 6)
