import json
import subprocess
import sys

import pytest

from bsblab import cli
from bsblab.cli import RunSpec, UsageError, parse_args, read_config


def run_cli(*args, cwd=None):
    cmd = [sys.executable, "-m", "bsblab", *args]
    return subprocess.run(cmd, capture_output=True, text=True, cwd=cwd)


CONFIG = """\
# fully damped unit geometry
l0 = 0.0
l1 = 1.0
l2 = 2.0
l3 = 3.0
rho1 = 1.0
rho2 = 1.0
beta = 1.0
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "structure.cfg"
    path.write_text(CONFIG)
    return str(path)


# --- config parsing ----------------------------------------------------------

def test_read_config_happy_path(config_file):
    cfg = read_config(config_file)
    assert (cfg.l0, cfg.l1, cfg.l2, cfg.l3) == (0.0, 1.0, 2.0, 3.0)
    assert (cfg.rho1, cfg.rho2, cfg.beta) == (1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("l0 = 0\n", "missing keys"),
        (CONFIG + "l0 = 5\n", "duplicate key"),
        (CONFIG + "gamma = 2\n", "unknown key"),
        (CONFIG.replace("l2 = 2.0", "l2 = two"), "cannot parse number"),
        (CONFIG.replace("l2 = 2.0", "l2"), "expected 'key = value'"),
    ],
)
def test_read_config_rejects_malformed_files(tmp_path, text, fragment):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(UsageError, match=fragment):
        read_config(str(path))


def test_read_config_missing_file():
    with pytest.raises(UsageError, match="cannot read config file"):
        read_config("/no/such/file.cfg")


# --- argument parsing ----------------------------------------------------------

def test_parse_args_defaults(config_file):
    spec = parse_args(["spectrum", "--config", config_file])
    assert isinstance(spec, RunSpec)
    assert spec.command == "spectrum"
    assert (spec.n1, spec.n2, spec.n3) == (40, 40, 40)
    assert spec.out_dir == "."
    assert spec.dump_matrices is False


def test_parse_args_rejections(config_file):
    bad = [
        ["resolvent", "--config", config_file, "--lambda-steps", "0"],
        ["resolvent", "--config", config_file, "--lambda-min", "2", "--lambda-max", "-2"],
        ["simulate", "--config", config_file, "--dt", "0"],
        ["simulate", "--config", config_file, "--n2", "0"],
        ["simulate", "--config", config_file, "--snapshot-points", "1"],
        ["verify", "--config", config_file, "--c4", "-1"],
        ["modes", "--config", config_file, "--count", "0"],
        ["spectrum"],                       # --config is required
        ["frobnicate", "--config", config_file],
        [],
    ]
    for argv in bad:
        with pytest.raises(UsageError):
            parse_args(argv)


def test_no_subcommand_lists_all_six():
    proc = run_cli()
    assert proc.returncode == 2
    for name in ("simulate", "spectrum", "resolvent", "decay", "modes", "verify"):
        assert name in proc.stderr


# --- subcommands end to end -------------------------------------------------------

def test_simulate_writes_energy_and_snapshots(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli(
        "simulate", "--config", config_file,
        "--n1", "4", "--n2", "4", "--n3", "4",
        "--dt", "0.002", "--t-final", "0.02",
        "--snapshot-every", "5", "--snapshot-points", "7",
        "--out-dir", str(out),
    )
    assert proc.returncode == 0, proc.stderr

    lines = (out / "energy.csv").read_text().splitlines()
    assert lines[0] == "t,E,dissipation,F"
    assert len(lines) == 12  # header + 10 steps + initial row
    first = [float(v) for v in lines[1].split(",")]
    last = [float(v) for v in lines[-1].split(",")]
    assert first[0] == 0.0 and last[0] == pytest.approx(0.02)
    assert last[1] < first[1]  # damped run loses energy

    snap = (out / "snapshots.csv").read_text().splitlines()
    assert snap[0] == "t,x,displacement,velocity"
    # snapshots at steps 0, 5, 10 with 7 grid points each
    assert len(snap) == 1 + 3 * 7


def test_spectrum_csv_schema(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli("spectrum", "--config", config_file,
                   "--n1", "3", "--n2", "3", "--n3", "3", "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[0] == "re,im"
    # state dimension = 2 * (2*3 + 2 + 2*3) = 28
    assert len(lines) == 29
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert all(re < 0 for re, _ in rows)
    assert rows == sorted(rows)
    assert "abscissa" in proc.stdout


def test_resolvent_row_count_and_sup(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli("resolvent", "--config", config_file,
                   "--n1", "3", "--n2", "3", "--n3", "3",
                   "--lambda-min", "-5", "--lambda-max", "5",
                   "--lambda-steps", "11", "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = (out / "resolvent.csv").read_text().splitlines()
    assert lines[0] == "lambda,norm"
    assert len(lines) == 12
    norms = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert all(n > 0 for n in norms)
    assert "sup" in proc.stdout


def test_decay_json_contract(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli("decay", "--config", config_file,
                   "--n1", "5", "--n2", "5", "--n3", "5", "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    payload = json.loads((out / "decay.json").read_text())
    assert set(payload) == {
        "abscissa", "alpha_fit", "dt", "mode_im", "mode_re",
        "r_squared", "ratio", "ratio_check", "regime", "t_final",
    }
    assert payload["regime"] == "DDD"
    assert payload["ratio_check"] in {
        "two_sided_pass", "two_sided_fail",
        "one_sided_pass", "one_sided_fail", "not_applicable",
    }
    assert 0.9 <= payload["ratio"] <= 1.1


def test_modes_table(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli("modes", "--config", config_file, "--count", "4",
                   "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = (out / "modes.csv").read_text().splitlines()
    assert lines[0] == "family,index,re,im"
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 2 * 4 + 4 + 4
    families = {r[0] for r in rows}
    assert families == {"string", "beam1", "beam2"}
    # the string rows come in conjugate or real pairs
    string_rows = [r for r in rows if r[0] == "string"]
    assert len(string_rows) == 8


def test_verify_passes_and_is_reproducible(tmp_path, config_file):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    p1 = run_cli("verify", "--config", config_file,
                 "--n1", "6", "--n2", "6", "--n3", "6", "--out-dir", str(out1))
    p2 = run_cli("verify", "--config", config_file,
                 "--n1", "6", "--n2", "6", "--n3", "6", "--out-dir", str(out2))
    assert p1.returncode == 0, p1.stderr
    assert p2.returncode == 0
    r1 = (out1 / "report.json").read_bytes()
    r2 = (out2 / "report.json").read_bytes()
    assert r1 == r2
    # stdout mentions the out-dir, so compare everything except that line
    trim = lambda s: [ln for ln in s.splitlines() if "report.json" not in ln]
    assert trim(p1.stdout) == trim(p2.stdout)
    assert p1.stdout.count("PASS") >= 20
    assert "FAIL" not in p1.stdout
    payload = json.loads(r1)
    assert payload["all_pass"] is True


def test_dump_matrices_round_trip(tmp_path, config_file):
    out = tmp_path / "out"
    proc = run_cli("spectrum", "--config", config_file,
                   "--n1", "2", "--n2", "2", "--n3", "2",
                   "--dump-matrices", "--out-dir", str(out))
    assert proc.returncode == 0, proc.stderr
    import numpy as np
    import bsblab as bb

    cfg = read_config(config_file)
    _, _, pencil = bb.discretize(cfg, 2, 2, 2)
    for name in ("S", "M", "D", "B", "K"):
        path = out / f"{name}.coo.txt"
        want = getattr(pencil, name)
        got = np.zeros_like(want)
        for ln in path.read_text().splitlines():
            i, j, v = ln.split()
            got[int(i), int(j)] = float(v)
        assert np.array_equal(got, want)


# --- exit codes ---------------------------------------------------------------

def test_exit_code_for_model_errors(tmp_path):
    path = tmp_path / "disorder.cfg"
    path.write_text(CONFIG.replace("l1 = 1.0", "l1 = 2.5"))
    proc = run_cli("spectrum", "--config", str(path), "--n1", "2", "--n2", "2", "--n3", "2")
    assert proc.returncode == 1
    assert "error:" in proc.stderr


def test_exit_code_for_usage_errors(tmp_path, config_file):
    path = tmp_path / "bad.cfg"
    path.write_text(CONFIG + "zeta = 9\n")
    proc = run_cli("spectrum", "--config", str(path))
    assert proc.returncode == 2
    assert "unknown key" in proc.stderr
    proc = run_cli("resolvent", "--config", config_file, "--lambda-steps", "1")
    assert proc.returncode == 2


def test_run_function_returns_exit_codes(tmp_path, config_file):
    spec = parse_args(["spectrum", "--config", config_file,
                       "--n1", "2", "--n2", "2", "--n3", "2",
                       "--out-dir", str(tmp_path / "x")])
    assert cli.run(spec) == 0
    spec = parse_args(["spectrum", "--config", "/no/such/file.cfg"])
    assert cli.run(spec) == 2
