"""Tests for the command-line interface: table rendering in all three
formats, error handling and exit codes, the verification subcommands, and
byte-for-byte determinism."""

import csv
import io
import json
import subprocess
import sys

import pytest

from chlab import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# orbit tables
# ---------------------------------------------------------------------------


def test_orbits_markdown_dihedral(capsys):
    code, out, err = run_cli(capsys, "orbits", "-g", "D:3", "-N", "1")
    assert code == 0 and err == ""
    lines = [l for l in out.splitlines() if l.startswith("|")]
    data_rows = lines[2:]  # header + separator
    assert len(data_rows) == 11
    saddle_rows = [row for row in data_rows if "Saddle^2" in row]
    assert len(saddle_rows) == 1 and "no" in saddle_rows[0]
    header = lines[0]
    for column in ("grading", "name", "base", "k", "type", "good",
                   "action/pi", "rotation", "cz", "class", "contractible"):
        assert column in header


def test_orbits_json_tetrahedral(capsys):
    code, out, err = run_cli(capsys, "orbits", "-g", "T", "-N", "1", "-f", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "chlab/v1"
    assert payload["group"] == "T"
    assert payload["command"] == "orbits"
    rows = payload["rows"]
    assert payload["count"] == len(rows) == 13
    names = {f"{r['base']}^{r['k']}" for r in rows}
    assert names == (
        {f"Vertex^{k}" for k in range(1, 6)}
        | {f"Edge^{k}" for k in range(1, 4)}
        | {f"Face^{k}" for k in range(1, 6)}
    )
    for row in rows:
        assert set(row) >= {"base", "k", "cz", "grading", "type", "good",
                            "class", "contractible"}


def test_orbits_csv_round_trips(capsys):
    code, out, _ = run_cli(capsys, "orbits", "-g", "C:4", "-N", "1", "-f", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert {row["base"] for row in rows} == {"NorthPole", "SouthPole"}


def test_orbits_sorted_by_grading(capsys):
    _, out, _ = run_cli(capsys, "orbits", "-g", "O", "-N", "2", "-f", "json")
    gradings = [row["grading"] for row in json.loads(out)["rows"]]
    assert gradings == sorted(gradings)


# ---------------------------------------------------------------------------
# argument errors
# ---------------------------------------------------------------------------


def test_rejects_trivial_group(capsys):
    code, out, err = run_cli(capsys, "orbits", "-g", "C:1", "-N", "1")
    assert code == 2
    assert "C:1" in err


def test_rejects_unknown_group(capsys):
    code, _, err = run_cli(capsys, "orbits", "-g", "X:3", "-N", "1")
    assert code == 2
    assert err != ""


def test_rejects_nonpositive_level(capsys):
    code, _, err = run_cli(capsys, "homology", "-g", "C:4", "-N", "0")
    assert code == 2


# ---------------------------------------------------------------------------
# homology reports
# ---------------------------------------------------------------------------


def test_homology_icosahedral_matches(capsys):
    code, out, _ = run_cli(capsys, "homology", "-g", "I", "-N", "2", "-f", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["match"] is True
    assert payload["ranks"] == payload["closed_form"]


def test_homology_cyclic_deep_level(capsys):
    code, out, _ = run_cli(capsys, "homology", "-g", "C:7", "-N", "3", "-f", "json")
    assert code == 0
    assert json.loads(out)["ranks"]["0"] == 6


def test_homology_csv_ranks(capsys):
    code, out, _ = run_cli(capsys, "homology", "-g", "D:4", "-N", "1", "-f", "csv")
    assert code == 0
    ranks = {row["degree"]: int(row["rank"]) for row in csv.DictReader(io.StringIO(out))}
    assert ranks == {"0": 6, "2": 6}


# ---------------------------------------------------------------------------
# verification subcommands
# ---------------------------------------------------------------------------


def test_verify_mckay(capsys):
    code, out, _ = run_cli(capsys, "verify", "mckay")
    assert code == 0
    assert "mckay: PASS" in out
    assert out.rstrip().endswith("OK (seed 2026)")


def test_verify_monotonicity_with_lower_depth(capsys):
    code, out, _ = run_cli(capsys, "verify", "monotonicity", "--nmax", "2")
    assert code == 0
    assert "monotonicity: PASS" in out


def test_verify_morse(capsys):
    code, out, _ = run_cli(capsys, "verify", "morse")
    assert code == 0
    assert "morse: PASS" in out
    assert "(1, 0, 1)" in out


def test_verify_seifert(capsys):
    code, out, _ = run_cli(capsys, "verify", "seifert")
    assert code == 0
    assert "seifert: PASS" in out


def test_verify_validates_group_flag(capsys):
    code, _, _ = run_cli(capsys, "verify", "seifert", "-g", "T")
    assert code == 0
    code, _, err = run_cli(capsys, "verify", "seifert", "-g", "C:1")
    assert code == 2 and "C:1" in err


def test_verify_rejects_unknown_check(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_orbit_output_is_deterministic(capsys):
    _, first, _ = run_cli(capsys, "orbits", "-g", "T", "-N", "2", "-f", "json")
    _, second, _ = run_cli(capsys, "orbits", "-g", "T", "-N", "2", "-f", "json")
    assert first == second


def test_verify_output_is_deterministic(capsys):
    _, first, _ = run_cli(capsys, "verify", "mckay")
    _, second, _ = run_cli(capsys, "verify", "mckay")
    assert first == second


def test_verify_thread_count_does_not_change_output(capsys, monkeypatch):
    _, baseline, _ = run_cli(capsys, "verify", "seifert")
    monkeypatch.setenv("CHLAB_THREADS", "1")
    _, serial, _ = run_cli(capsys, "verify", "seifert")
    assert baseline == serial


# ---------------------------------------------------------------------------
# formal-scalar rendering and entry point
# ---------------------------------------------------------------------------


def test_format_formal():
    from fractions import Fraction
    from chlab.orbits import FormalScalar

    assert cli.format_formal(FormalScalar(Fraction(5, 3), 0)) == "5/3"
    assert cli.format_formal(FormalScalar(2, Fraction(1, 6))) == "2 + 1/6·eps"
    assert cli.format_formal(FormalScalar(2, Fraction(-1, 6))) == "2 - 1/6·eps"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "chlab" in out


def test_console_script_is_installed():
    proc = subprocess.run(["chlab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "orbits" in proc.stdout
