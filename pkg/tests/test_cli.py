import csv
import io
import json
import math
import subprocess
import sys

import pytest

from spinchain.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- spectrum / roots -------------------------------------------------------


def test_spectrum_table(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--max-n", "2", "--A", "2", "--hbar", "1")
    assert code == 0
    rows = parse_csv(out)
    assert [r["n"] for r in rows] == ["0", "1", "1", "2", "2", "2"]
    ground = rows[0]
    assert float(ground["energy"]) == pytest.approx(-0.5, abs=1e-12)
    assert float(ground["lambda"]) == -2.0
    assert ground["roots"] == ""
    assert float(rows[1]["energy"]) == pytest.approx(2.5 - 2 * math.sqrt(3), abs=1e-10)


def test_spectrum_json_schema(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--max-n", "1", "--A", "2",
                           "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 3
    for row in rows:
        assert list(row.keys()) == [
            "n", "lambda", "l", "branch", "roots", "energy", "bethe_residual",
        ]
    # roots serialize as [re, im] pairs
    assert rows[1]["roots"][0][1] == 0.0
    assert rows[1]["roots"][0][0] == pytest.approx((2 - math.sqrt(3)) / 2, abs=1e-10)


def test_roots_command_lists_both_branches(capsys):
    code, out, _ = run_cli(capsys, "roots", "--n", "1", "--A", "2")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 2
    assert {r["branch"] for r in rows} == {"0", "1"}
    assert all(float(r["bethe_residual"]) < 1e-10 for r in rows)


def test_spectrum_requires_positive_anisotropy(capsys):
    code, _, err = run_cli(capsys, "spectrum", "--max-n", "1")
    assert code == 2
    assert "domain error" in err


# --- mathieu family ----------------------------------------------------------


def test_inplane_ladder(capsys):
    code, out, _ = run_cli(capsys, "inplane", "--B", "0", "--orders", "0..5")
    assert code == 0
    rows = parse_csv(out)
    assert [float(r["energy"]) for r in rows] == [0.0, 0.5, 2.0, 4.5, 8.0, 12.5]


def test_offplane_orders_parsing(capsys):
    code, out, _ = run_cli(capsys, "offplane", "--A", "2", "--orders", "0,1.5,2")
    assert code == 0
    rows = parse_csv(out)
    assert [r["nu"] for r in rows] == ["0", "1.5", "2"]


def test_mathieu_value(capsys):
    code, out, _ = run_cli(capsys, "mathieu", "--nu", "1", "--q", "1")
    assert code == 0
    row = parse_csv(out)[0]
    assert float(row["a_nu"]) == pytest.approx(1.8591080725143634, abs=1e-10)


def test_mathieu_samples(capsys):
    code, out, _ = run_cli(capsys, "mathieu", "--nu", "1", "--q", "0", "--samples", "4")
    assert code == 0
    rows = parse_csv(out)
    assert [r["x"] for r in rows][0] == "0"
    assert float(rows[1]["ce"]) == pytest.approx(math.cos(math.pi / 2), abs=1e-12)
    assert float(rows[1]["se"]) == pytest.approx(1.0, abs=1e-12)


def test_bad_orders_is_domain_error(capsys):
    code, _, err = run_cli(capsys, "inplane", "--orders", "five")
    assert code == 2


# --- project -----------------------------------------------------------------


def test_project_sphere_to_plane(capsys):
    code, out, _ = run_cli(capsys, "project", "--s1", "1", "--s2", "0", "--s3", "0")
    assert code == 0
    row = parse_csv(out)[0]
    assert (row["P"], row["Q"], row["at_infinity"]) == ("1", "0", "false")


def test_project_pole_flags_infinity(capsys):
    code, out, _ = run_cli(capsys, "project", "--s1", "0", "--s2", "0", "--s3", "-1")
    assert code == 0
    row = parse_csv(out)[0]
    assert (row["P"], row["Q"], row["at_infinity"]) == ("", "", "true")


def test_project_plane_to_sphere(capsys):
    code, out, _ = run_cli(capsys, "project", "--P", "1", "--Q", "0")
    assert code == 0
    row = parse_csv(out)[0]
    assert (row["S1"], row["S2"], row["S3"]) == ("1", "0", "0")


def test_project_batch_roundtrip(tmp_path, capsys):
    src = tmp_path / "spins.csv"
    src.write_text("S1,S2,S3\n0,0,1\n1,0,0\n0,0,-1\n")
    code, out, _ = run_cli(capsys, "project", "--batch", str(src))
    assert code == 0
    mapped = tmp_path / "mapped.csv"
    mapped.write_text(out)
    code, out2, _ = run_cli(capsys, "project", "--batch", str(mapped))
    assert code == 0
    rows = parse_csv(out2)
    assert [r["S3"] for r in rows] == ["1", "0", "-1"]
    assert rows[2] == {"S1": "0", "S2": "0", "S3": "-1"}


def test_project_requires_an_input(capsys):
    code, _, err = run_cli(capsys, "project")
    assert code == 2


# --- classical ----------------------------------------------------------------


def test_classical_output_columns(capsys):
    code, out, _ = run_cli(
        capsys, "classical", "--A", "2", "--P", "0.1",
        "--z-span", "0", "1", "--step", "0.001",
    )
    assert code == 0
    rows = parse_csv(out)
    assert list(rows[0].keys()) == ["z", "P", "Q", "PiP", "PiQ", "H"]
    assert len(rows) == 1001
    h = [float(r["H"]) for r in rows]
    assert max(abs(v - h[0]) for v in h) < 1e-9


def test_classical_divergence_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "classical", "--PiP", "1e6", "--z-span", "0", "10", "--step", "0.001",
    )
    assert code == 3
    assert "solver error" in err


# --- verify --------------------------------------------------------------------


def test_verify_all_suites(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "all")
    assert code == 0
    rows = parse_csv(out)
    assert all(r["passed"] == "true" for r in rows)


def test_verify_residual_profile(capsys):
    code, out, _ = run_cli(capsys, "verify", "--n", "0", "--A", "2")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 101
    assert list(rows[0].keys()) == ["n", "branch", "r", "residual"]


def test_verify_writes_case_files(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "mathieu", "--out", str(tmp_path))
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files and all(name.endswith(".csv") for name in files)


# --- config and determinism -----------------------------------------------------


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "params.cfg"
    cfg.write_text("A = 1.0\nhbar = 1.0\n")
    code, out_cfg, _ = run_cli(capsys, "spectrum", "--max-n", "0", "--config", str(cfg))
    assert code == 0
    code, out_override, _ = run_cli(
        capsys, "spectrum", "--max-n", "0", "--config", str(cfg), "--A", "2"
    )
    assert code == 0
    e_cfg = float(parse_csv(out_cfg)[0]["energy"])
    e_override = float(parse_csv(out_override)[0]["energy"])
    assert e_cfg == pytest.approx(1.75 - math.sqrt(2), abs=1e-12)  # A = 1
    assert e_override == pytest.approx(-0.5, abs=1e-12)  # flag wins


def test_byte_identical_reruns(tmp_path, capsys):
    out1 = tmp_path / "run1.csv"
    out2 = tmp_path / "run2.csv"
    for out in (out1, out2):
        code = main(["spectrum", "--max-n", "3", "--A", "2", "--out", str(out)])
        assert code == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_fifteen_significant_digits(capsys):
    code, out, _ = run_cli(capsys, "roots", "--n", "1", "--A", "2", "--format", "json")
    rows = json.loads(out)
    root = rows[0]["roots"][0][0]
    assert root == pytest.approx((2 - math.sqrt(3)) / 2, abs=1e-14)
    # the rendered literal carries exactly 15 significant digits
    assert "0.133974596215561" in out


# --- exit codes ----------------------------------------------------------------


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 64


def test_malformed_flag_is_usage_error(capsys):
    assert main(["spectrum", "--max-n", "two"]) == 64


def test_domain_error_exit(capsys):
    assert main(["spectrum", "--max-n", "1", "--A", "2", "--hbar", "0"]) == 2


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert "exit codes" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "spinchain.cli", "inplane", "--B", "0", "--orders", "0..2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "nu,parity,energy"
