# SPDX-License-Identifier: Apache-2.0
import os
import pathlib
import subprocess

import pytest

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "suite"
CLI = os.environ.get("STRSOLVE_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="STRSOLVE_CLI not set")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, timeout=120)


@pytest.mark.parametrize(
    "name,verdict,code",
    [
        ("booleans", "sat", 0),
        ("regex_unsat", "unsat", 0),
        ("overlap", "unknown", 0),
        ("unsupported", "unknown", 0),
        ("parse_error", "error", 3),
    ],
)
def test_single_file_verdicts(name, verdict, code):
    p = run("--timeout", 5, FIXTURES / f"{name}.smt2")
    assert p.returncode == code
    assert p.stdout.splitlines()[0] == verdict


def test_timeout_exit_code():
    p = run("--timeout", 0.5, FIXTURES / "pigeonhole.smt2")
    assert p.stdout.splitlines()[0] == "timeout"
    assert p.returncode == 2


def test_model_and_stats():
    p = run("--model", "--validate-model", "--stats", FIXTURES / "concat_split.smt2")
    assert p.returncode == 0
    assert p.stdout.startswith("sat\n(model")
    assert "decisions=" in p.stdout and "theory_activity_overrides=" in p.stdout


def test_suite_mode_and_csv(tmp_path):
    out = tmp_path / "runs.csv"
    p = run("--timeout", 1, "--jobs", 2, "--csv", out, FIXTURES)
    assert p.returncode == 0
    lines = p.stdout.splitlines()
    assert len(lines) == 18
    assert all(line.startswith(str(FIXTURES)) for line in lines[:10])
    assert lines[10].split() == ["sat", "4"]
    assert lines[13].split() == ["timeout", "1"]
    assert lines[-1].startswith("Total time without timeouts (s)")
    rows = out.read_text().splitlines()
    assert rows[0] == "file,verdict,time,decisions,conflicts"
    assert len(rows) == 11


def test_compare():
    p = run("--compare", FIXTURES / "var_var.smt2")
    assert p.returncode == 0
    header, row = p.stdout.splitlines()[:2]
    assert header == "file,baseline_verdict,baseline_decisions,enabled_verdict,enabled_decisions"
    assert row.split(",")[1] == "sat" and row.split(",")[3] == "sat"


def test_bad_option():
    p = run("--timeout", "abc", FIXTURES / "booleans.smt2")
    assert p.returncode != 0
