"""Command line front end.

Six subcommands: simulate, spectrum, resolvent, decay, modes, verify. All
read the structure from a key = value config file (keys l0, l1, l2, l3,
rho1, rho2, beta; anything else is rejected) and write CSV or JSON files
into --out-dir. Every float is written with 17 significant digits so the
files round-trip exactly, and nothing depends on time or environment:
repeating an invocation reproduces the outputs byte for byte.

Exit codes: 0 success, 1 for model/numerics errors (and for a failed
verify), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, dynamics, fem, model, spectral
from .analysis import certify_decay, cross_validate, render_report
from .dynamics import default_dt, simulate
from .fem import discretize, evaluate_state, interpolate
from .model import StructureConfig, default_initial_data, validate_config
from .spectral import (
    beam_clamped_free_frequencies,
    eigenvalues,
    resolvent_sweep,
    string_modes_closed_form,
)


class UsageError(Exception):
    """Bad command line or config file; exits with status 2."""


_CONFIG_KEYS = ("l0", "l1", "l2", "l3", "rho1", "rho2", "beta")

_MODULE_ERRORS = (
    model.OrderingViolation,
    model.NegativeDamping,
    fem.ZeroElements,
    fem.NonpositiveLength,
    fem.IncompatibleInterface,
    fem.OutOfDomain,
    dynamics.DimensionMismatch,
    dynamics.SolveFailure,
    dynamics.NonpositiveWeight,
    spectral.FactorizationFailure,
    spectral.EmptySpectrum,
    spectral.NonpositiveParameter,
    analysis.NonpositiveEnergy,
    analysis.WindowTooSmall,
    ValueError,
)


def read_config(path: str) -> StructureConfig:
    """Parse the key = value config file into a StructureConfig.

    Blank lines and # comments are skipped; unknown, duplicate or missing
    keys and unparseable numbers raise UsageError.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(
                f"{path}:{lineno}: unknown key {key!r} "
                f"(known keys: {', '.join(_CONFIG_KEYS)})"
            )
        if key in values:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: cannot parse number {val!r}") from exc
    missing = [k for k in _CONFIG_KEYS if k not in values]
    if missing:
        raise UsageError(f"{path}: missing keys: {', '.join(missing)}")
    return StructureConfig(**values)


@dataclass
class RunSpec:
    """Parsed invocation: subcommand plus every knob it may consume."""

    command: str
    config_path: str
    n1: int = 40
    n2: int = 40
    n3: int = 40
    out_dir: str = "."
    dump_matrices: bool = False
    dt: float | None = None
    t_final: float | None = None
    snapshot_every: int = 0
    snapshot_points: int = 101
    lambda_min: float = -50.0
    lambda_max: float = 50.0
    lambda_steps: int = 2001
    count: int = 5
    energy_weight: float | None = None


class _Parser(argparse.ArgumentParser):
    # route every argparse failure through UsageError so exit codes stay
    # uniform whether the problem is an unknown flag or a bad value
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_args(argv) -> RunSpec:
    parser = _Parser(prog="bsblab", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True,
                                 metavar="{simulate,spectrum,resolvent,decay,modes,verify}")

    def add_common(sub, matrices=True):
        sub.add_argument("--config", required=True, dest="config_path",
                         help="key = value structure file")
        sub.add_argument("--n1", type=int, default=40, help="elements on the first beam")
        sub.add_argument("--n2", type=int, default=40, help="elements on the string")
        sub.add_argument("--n3", type=int, default=40, help="elements on the second beam")
        sub.add_argument("--out-dir", default=".", help="output directory (created if missing)")
        if matrices:
            sub.add_argument("--dump-matrices", action="store_true",
                             help="also write S, M, D, B, K in coordinate format")

    sim = subs.add_parser("simulate", help="trapezoidal run from the canonical initial state")
    add_common(sim)
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--t-final", type=float, default=None)
    sim.add_argument("--snapshot-every", type=int, default=0,
                     help="store the state every this many steps (0 disables)")
    sim.add_argument("--snapshot-points", type=int, default=101,
                     help="x-grid resolution of snapshots.csv")

    spe = subs.add_parser("spectrum", help="all pencil eigenvalues")
    add_common(spe)

    res = subs.add_parser("resolvent", help="resolvent norms along the imaginary axis")
    add_common(res)
    res.add_argument("--lambda-min", type=float, default=-50.0)
    res.add_argument("--lambda-max", type=float, default=50.0)
    res.add_argument("--lambda-steps", type=int, default=2001)

    dec = subs.add_parser("decay", help="slowest-mode decay rate vs spectral abscissa")
    add_common(dec)
    dec.add_argument("--dt", type=float, default=None)
    dec.add_argument("--t-final", type=float, default=None)

    mod = subs.add_parser("modes", help="closed-form oracle table for the isolated members")
    add_common(mod, matrices=False)
    mod.add_argument("--count", type=int, default=5, help="modes per member")

    ver = subs.add_parser("verify", help="full invariant sweep; exit 0 iff all pass")
    add_common(ver)
    ver.add_argument("--dt", type=float, default=None)
    ver.add_argument("--t-final", type=float, default=None)
    ver.add_argument("--c4", type=float, default=None, dest="energy_weight",
                     help="energy weight of the Lyapunov functional")

    ns = parser.parse_args(argv)
    spec = RunSpec(**vars(ns))

    for name in ("n1", "n2", "n3"):
        if getattr(spec, name) < 1:
            raise UsageError(f"--{name} must be >= 1, got {getattr(spec, name)}")
    if spec.dt is not None and not spec.dt > 0:
        raise UsageError(f"--dt must be > 0, got {spec.dt}")
    if spec.t_final is not None and not spec.t_final > 0:
        raise UsageError(f"--t-final must be > 0, got {spec.t_final}")
    if spec.lambda_steps < 2:
        raise UsageError(f"--lambda-steps must be >= 2, got {spec.lambda_steps}")
    if not spec.lambda_max > spec.lambda_min:
        raise UsageError(
            f"--lambda-max must exceed --lambda-min, got [{spec.lambda_min}, {spec.lambda_max}]"
        )
    if spec.snapshot_every < 0:
        raise UsageError(f"--snapshot-every must be >= 0, got {spec.snapshot_every}")
    if spec.snapshot_points < 2:
        raise UsageError(f"--snapshot-points must be >= 2, got {spec.snapshot_points}")
    if spec.count < 1:
        raise UsageError(f"--count must be >= 1, got {spec.count}")
    if spec.energy_weight is not None and not spec.energy_weight > 0:
        raise UsageError(f"--c4 must be > 0, got {spec.energy_weight}")
    return spec


# --- output helpers ---------------------------------------------------------

def _fmt(x) -> str:
    # + 0.0 folds negative zero into plain zero
    return format(float(x) + 0.0, ".17g")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_rows(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(fields) for fields in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _dump_matrices(pencil, out_dir: str) -> None:
    # nonzero entries in row-major order: "row col value"
    for name in ("S", "M", "D", "B", "K"):
        matrix = getattr(pencil, name)
        lines = []
        for i in range(matrix.shape[0]):
            for j in range(matrix.shape[1]):
                if matrix[i, j] != 0.0:
                    lines.append(f"{i} {j} {_fmt(matrix[i, j])}")
        _write_text(os.path.join(out_dir, f"{name}.coo.txt"), "\n".join(lines) + "\n")


def _prepare(spec: RunSpec):
    cfg = validate_config(read_config(spec.config_path))
    mesh, dofs, pencil = discretize(cfg, spec.n1, spec.n2, spec.n3)
    os.makedirs(spec.out_dir, exist_ok=True)
    if spec.dump_matrices:
        _dump_matrices(pencil, spec.out_dir)
    return cfg, mesh, dofs, pencil


# --- subcommands ------------------------------------------------------------

def _cmd_simulate(spec: RunSpec) -> int:
    cfg, mesh, dofs, pencil = _prepare(spec)
    dt = spec.dt if spec.dt is not None else default_dt(cfg)
    t_final = spec.t_final if spec.t_final is not None else 10.0
    y0 = interpolate(default_initial_data(cfg), mesh, dofs)
    sim = simulate(pencil, y0, dt, t_final, snapshot_every=spec.snapshot_every)
    tr = sim.trace

    path = os.path.join(spec.out_dir, "energy.csv")
    _write_rows(path, "t,E,dissipation,F",
                ((_fmt(t), _fmt(e), _fmt(d), _fmt(c))
                 for t, e, d, c in zip(tr.times, tr.energy, tr.dissipation, tr.cross)))
    written = [path]

    if spec.snapshot_every > 0:
        grid = np.linspace(cfg.l0, cfg.l3, spec.snapshot_points)
        rows = []
        for t, state in sim.snapshots:
            for x in grid:
                disp, vel = evaluate_state(state, float(x), mesh, dofs)
                rows.append((_fmt(t), _fmt(x), _fmt(disp.real), _fmt(vel.real)))
        path = os.path.join(spec.out_dir, "snapshots.csv")
        _write_rows(path, "t,x,displacement,velocity", rows)
        written.append(path)

    print(f"simulate: {len(tr.times) - 1} steps, dt = {_fmt(dt)}, "
          f"E(0) = {_fmt(tr.energy[0])}, E(end) = {_fmt(tr.energy[-1])}")
    for p in written:
        print(f"wrote {p}")
    return 0


def _cmd_spectrum(spec: RunSpec) -> int:
    cfg, mesh, dofs, pencil = _prepare(spec)
    report = eigenvalues(pencil)
    path = os.path.join(spec.out_dir, "spectrum.csv")
    _write_rows(path, "re,im",
                ((_fmt(m.real), _fmt(m.imag)) for m in report.eigenvalues))
    print(f"spectrum: {report.eigenvalues.size} eigenvalues ({report.regime.value}), "
          f"abscissa = {_fmt(report.abscissa)}, "
          f"min |Re| = {_fmt(report.min_axis_distance)}")
    print(f"wrote {path}")
    return 0


def _cmd_resolvent(spec: RunSpec) -> int:
    cfg, mesh, dofs, pencil = _prepare(spec)
    table = resolvent_sweep(pencil, spec.lambda_min, spec.lambda_max, spec.lambda_steps)
    path = os.path.join(spec.out_dir, "resolvent.csv")
    _write_rows(path, "lambda,norm",
                ((_fmt(lam), _fmt(nrm)) for lam, nrm in zip(table.lambdas, table.norms)))
    print(f"resolvent: sup over [{_fmt(spec.lambda_min)}, {_fmt(spec.lambda_max)}] "
          f"({spec.lambda_steps} points) = {_fmt(table.sup)}")
    print(f"wrote {path}")
    return 0


def _cmd_decay(spec: RunSpec) -> int:
    cfg, mesh, dofs, pencil = _prepare(spec)
    cert = certify_decay(cfg, pencil, dt=spec.dt, t_final=spec.t_final)
    path = os.path.join(spec.out_dir, "decay.json")
    pairs = [
        ("abscissa", cert.abscissa),
        ("alpha_fit", cert.alpha_fit),
        ("dt", cert.dt),
        ("mode_im", cert.mode.imag),
        ("mode_re", cert.mode.real),
        ("r_squared", cert.r_squared),
        ("ratio", cert.ratio),
        ("ratio_check", cert.ratio_check),
        ("regime", cert.regime),
        ("t_final", cert.t_final),
    ]
    body = ",\n".join(f'  "{k}": {analysis._json_scalar(v)}' for k, v in pairs)
    _write_text(path, "{\n" + body + "\n}\n")
    print(f"decay: alpha = {_fmt(cert.alpha_fit)}, "
          f"2|abscissa| = {_fmt(2 * abs(cert.abscissa))}, "
          f"ratio = {analysis._json_scalar(cert.ratio)}, check = {cert.ratio_check}")
    print(f"wrote {path}")
    return 0


def _cmd_modes(spec: RunSpec) -> int:
    cfg = validate_config(read_config(spec.config_path))
    os.makedirs(spec.out_dir, exist_ok=True)
    rows = []
    length2 = cfg.l2 - cfg.l1
    for k in range(1, spec.count + 1):
        plus, minus = string_modes_closed_form(cfg.beta, length2, k)
        rows.append(("string", str(k), _fmt(plus.real), _fmt(plus.imag)))
        rows.append(("string", str(k), _fmt(minus.real), _fmt(minus.imag)))
    for family, length in (("beam1", cfg.l1 - cfg.l0), ("beam2", cfg.l3 - cfg.l2)):
        for j, omega in enumerate(beam_clamped_free_frequencies(length, spec.count), 1):
            rows.append((family, str(j), _fmt(0.0), _fmt(omega)))
    path = os.path.join(spec.out_dir, "modes.csv")
    _write_rows(path, "family,index,re,im", rows)
    print(f"modes: {len(rows)} closed-form rows for the isolated members")
    print(f"wrote {path}")
    return 0


def _cmd_verify(spec: RunSpec) -> int:
    cfg, mesh, dofs, pencil = _prepare(spec)
    report = cross_validate(cfg, mesh, dofs, pencil, dt=spec.dt,
                            t_final=spec.t_final, energy_weight=spec.energy_weight)
    path = os.path.join(spec.out_dir, "report.json")
    _write_text(path, render_report(report))
    for r in report.invariant_results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} (residual = {_fmt(r.residual)})")
    verdict = "all checks passed" if report.all_pass else "CHECKS FAILED"
    print(f"verify: {verdict}; regime = {report.regime}, "
          f"abscissa = {_fmt(report.abscissa)}, ratio = {analysis._json_scalar(report.ratio)}")
    print(f"wrote {path}")
    return 0 if report.all_pass else 1


_COMMANDS = {
    "simulate": _cmd_simulate,
    "spectrum": _cmd_spectrum,
    "resolvent": _cmd_resolvent,
    "decay": _cmd_decay,
    "modes": _cmd_modes,
    "verify": _cmd_verify,
}


def run(spec: RunSpec) -> int:
    """Execute a parsed invocation; returns the process exit code."""
    try:
        return _COMMANDS[spec.command](spec)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except _MODULE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        spec = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(spec)
