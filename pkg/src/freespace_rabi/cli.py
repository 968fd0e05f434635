"""Command-line entry point.

    freespace-rabi <command> [--key value ...] [--config file.json] [--output path]

Natural units throughout: rates and Rabi frequencies in units of 1/time,
usually with gamma = 1.  Exit codes: 0 ok, 1 usage/config, 2 numerical or
truncation failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .collision import (
    CollisionConfig,
    collision_run,
    lindblad_distance,
    mollow_displacement_check,
)
from .core import (
    CoherentAmplitude,
    TruncationError,
    infidelity,
    purity,
    rabi_rotation,
    von_neumann_entropy,
)
from .experiments import (
    BeamGeometry,
    DegenerateFitError,
    bloch_point,
    jc_point,
    n_prime,
    n_prime_comparison,
    scan_beam_area,
    scan_gamma,
    scan_mean_photon,
    _geometric,
)
from .jaynes_cummings import JCConfig, jc_evolve, revival_time
from .records import ScanRecord, emit_records
from .semiclassical import IntegrationStepError, PulseSpec

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

REQUIRED = object()


class UsageError(Exception):
    pass


def _grid(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


# name -> (type, default, unit/help)
PARAMS: dict[str, dict[str, tuple]] = {
    "jc": {
        "g": (float, 1.0, "atom-field coupling [rad/time]"),
        "n-mean": (float, 25.0, "mean photon number <n> = |alpha|^2"),
        "theta": (float, math.pi / 2, "pulse area for the gate infidelity [rad]"),
        "samples": (int, 4001, "time samples for the inversion trace"),
    },
    "bloch": {
        "omega": (float, 100.0, "Rabi frequency [rad/time]"),
        "gamma": (float, REQUIRED, "spontaneous decay rate [1/time]"),
        "theta": (float, math.pi / 2, "pulse area [rad]"),
    },
    "collision": {
        "gamma": (float, REQUIRED, "decay rate [1/time]"),
        "beta": (complex, REQUIRED, "input amplitude [sqrt(photons/time)]; drive phase arg(i*beta)"),
        "dt": (float, REQUIRED, "time-bin width [time]"),
        "t": (float, 1.0, "total interaction time, a whole number of bins [time]"),
        "n-anc": (int, 3, "ancilla Fock cutoff [photons]"),
    },
    "mollow-check": {
        "alpha": (complex, 2.0, "coherent amplitude"),
        "g": (float, 1.0, "coupling [rad/time]"),
        "t": (float, 1.0, "evolution time [time]"),
    },
    "scan-n": {
        "theta": (float, math.pi / 2, "pulse area [rad]"),
        "n-grid": (_grid, "25,50,100,200,400", "comma-separated geometric grid of <n>"),
        "g": (float, 1.0, "coupling [rad/time]"),
    },
    "scan-area": {
        "theta": (float, math.pi / 2, "pulse area [rad]"),
        "omega": (float, 50.0, "Rabi frequency at the atom, held fixed [rad/time]"),
        "gamma": (float, 1.0, "decay rate for the collision model [1/time]"),
        "areas": (_grid, "1,2,4,8", "comma-separated beam areas [length^2]"),
        "photons-per-area": (float, 100.0, "<n> per unit area at this Rabi frequency [1/length^2]"),
        "k": (float, 2 * math.pi, "wavenumber [1/length]"),
    },
    "scan-gamma": {
        "theta": (float, math.pi / 2, "pulse area [rad]"),
        "omega": (float, 1.0, "Rabi frequency [rad/time]"),
        "gammas": (_grid, "0.0001,0.0003,0.001,0.003", "comma-separated decay rates [1/time]"),
    },
    "nprime": {
        "omega": (float, 100.0, "Rabi frequency [rad/time]"),
        "gamma": (float, 1.0, "decay rate [1/time]"),
        "theta": (float, math.pi, "pulse area; duration T = theta/omega [rad]"),
        "k": (float, 2 * math.pi, "wavenumber [1/length]"),
        "ratios": (_grid, "50,100,200", "omega/gamma values compared against collision infidelity"),
    },
}

SCANS = {"scan-n", "scan-area", "scan-gamma", "nprime"}
COMMON = {"output", "format", "jobs"}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output: Path | None = None
    fmt: str = "csv"
    jobs: int = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freespace-rabi", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd, table in PARAMS.items():
        p = sub.add_parser(cmd, help=f"run {cmd}", formatter_class=argparse.RawDescriptionHelpFormatter)
        for key, (_, default, help_) in table.items():
            shown = "required" if default is REQUIRED else f"default: {default}"
            p.add_argument(f"--{key}", dest=key, default=argparse.SUPPRESS, help=f"{help_} ({shown})")
        p.add_argument("--config", default=None, help="JSON file of key/value parameters")
        out_default = f"{cmd}.csv" if cmd in SCANS else "none"
        p.add_argument("--output", default=argparse.SUPPRESS, help=f"record output path (default: {out_default})")
        p.add_argument("--format", default=argparse.SUPPRESS, choices=["csv", "json"], help="record format (default: from suffix, else csv)")
        p.add_argument("--jobs", default=argparse.SUPPRESS, help="parallel scan workers (default: 1)")
    return parser


def _convert(key, caster, value):
    try:
        return caster(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key}: cannot parse {value!r}") from None


def parse_config(argv=None, config: dict | None = None) -> RunConfig:
    """Merge flags over config-file values over defaults and validate."""
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    table = PARAMS[command]
    file_values = dict(config or {})
    path = ns.pop("config", None)
    if path is not None:
        try:
            file_values.update(json.loads(Path(path).read_text()))
        except OSError as exc:
            raise UsageError(f"config: cannot read {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config: invalid JSON in {path}: {exc}") from None
    file_values = {k.replace("_", "-"): v for k, v in file_values.items()}
    unknown = sorted(set(file_values) - set(table) - COMMON)
    if unknown:
        raise UsageError(f"unknown key(s) for {command}: {', '.join(unknown)}")

    params = {}
    for key, (caster, default, _) in table.items():
        if key in ns:
            raw = ns[key]
        elif key in file_values:
            raw = file_values[key]
        elif default is REQUIRED:
            raise UsageError(f"missing required key '{key.replace('-', '_')}' (--{key})")
        else:
            raw = default
        params[key.replace("-", "_")] = _convert(key, caster, raw)

    merged = {k: ns.get(k, file_values.get(k)) for k in COMMON}
    output = merged["output"]
    if output is None and command in SCANS:
        output = f"{command}.csv"
    fmt = merged["format"] or (Path(output).suffix.lstrip(".").lower() if output else "csv") or "csv"
    if fmt not in ("csv", "json"):
        raise UsageError(f"format: unsupported {fmt!r}")
    jobs = _convert("jobs", int, merged["jobs"] if merged["jobs"] is not None else 1)
    if jobs < 1:
        raise UsageError("jobs: must be >= 1")
    cfg = RunConfig(command, params, Path(output) if output else None, fmt, jobs)
    try:
        _validate(cfg)
    except (ValueError, TruncationError) as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _validate(cfg: RunConfig) -> None:
    p = cfg.params
    c = cfg.command
    if c == "jc":
        JCConfig(g=p["g"], alpha=CoherentAmplitude.from_mean_photons(p["n_mean"]))
        if p["samples"] < 2:
            raise ValueError("samples: need at least 2")
    elif c == "bloch":
        PulseSpec.from_area(p["theta"], p["omega"], p["gamma"])
    elif c == "collision":
        steps = round(p["t"] / p["dt"]) if p["dt"] > 0 else 0
        CollisionConfig(p["gamma"], p["beta"], p["dt"], steps, p["n_anc"])
        if abs(steps * p["dt"] - p["t"]) > 1e-9 * max(1.0, p["t"]):
            raise ValueError("t: must be a whole number of bins dt")
    elif c == "mollow-check":
        if not p["g"] > 0 or p["t"] < 0:
            raise ValueError("g: must be positive and t nonnegative")
    elif c == "scan-n":
        if len(p["n_grid"]) < 4 or not _geometric(p["n_grid"]):
            raise ValueError("n_grid: need at least 4 geometrically spaced positive points")
    elif c == "scan-area":
        for a in p["areas"]:
            BeamGeometry(a, p["omega"], p["k"], p["photons_per_area"])
        if not p["gamma"] > 0:
            raise ValueError("gamma: must be positive")
    elif c == "scan-gamma":
        if min(p["gammas"]) < 0:
            raise ValueError("gammas: must be nonnegative")
        if p["omega"] < 100 * max(p["gammas"]):
            raise ValueError("omega: must be at least 100 * max(gammas)")
    elif c == "nprime":
        n_prime(p["omega"], p["gamma"], p["theta"] / p["omega"] if p["omega"] > 0 else 0.0, p["k"])
        if min(p["ratios"]) <= 0:
            raise ValueError("ratios: must be positive")


def _run_jc(p, jobs):
    cfg = JCConfig(g=p["g"], alpha=CoherentAmplitude.from_mean_photons(p["n_mean"]))
    out = jc_point(p["n_mean"], p["theta"], p["g"])
    print(f"jc: <n>={p['n_mean']:.6g} theta={p['theta']:.6g} infidelity={out['infidelity']:.6e} entropy={out['entropy']:.6e}")
    if p["n_mean"] > 0:
        predicted = 2 * math.pi * math.sqrt(p["n_mean"]) / p["g"]
        times = np.linspace(0.0, 1.6 * predicted, p["samples"])
        res = jc_evolve(cfg, times)
        t_rev = revival_time(times, res.inversion, predicted, cfg.mean_rabi)
        print(f"revival_time={t_rev:.6g} predicted={predicted:.6g}")
    return [ScanRecord("jc", "jc", n_mean=p["n_mean"], omega=cfg.mean_rabi, theta=p["theta"], **out)]


def _run_bloch(p, jobs):
    out = bloch_point(p["omega"], p["gamma"], p["theta"])
    print(f"bloch: omega/gamma={p['omega'] / p['gamma'] if p['gamma'] else math.inf:.6g} infidelity={out['infidelity']:.6e}")
    return [ScanRecord("bloch", "bloch", gamma=p["gamma"], omega=p["omega"], theta=p["theta"], **out)]


def _run_collision(p, jobs):
    steps = round(p["t"] / p["dt"])
    cfg = CollisionConfig(p["gamma"], p["beta"], p["dt"], steps, p["n_anc"])
    res = collision_run(cfg)
    rho = res.final
    theta = cfg.omega_eff * cfg.duration
    target = rabi_rotation(theta, cfg.drive_phase)[:, 0]
    pulse = PulseSpec(cfg.omega_eff, cfg.duration, cfg.gamma)
    dist = lindblad_distance(cfg, pulse, cfg.duration)
    rec = ScanRecord(
        "collision", "collision", gamma=cfg.gamma, omega=cfg.omega_eff, theta=theta, dt=cfg.dt,
        infidelity=infidelity(rho, target), purity=purity(rho), entropy=von_neumann_entropy(rho),
        survival=float(res.survival[-1]),
    )
    print(
        f"collision: omega_eff={cfg.omega_eff:.6g} rho_ee={rho.elements[1, 1].real:.6e} "
        f"survival={res.survival[-1]:.6e} emitted={res.emitted[-1]:.6e} bloch_distance={dist:.3e}"
    )
    return [rec]


def _run_mollow(p, jobs):
    d = mollow_displacement_check(p["alpha"], p["g"], p["t"])
    print(f"mollow-check: trace_distance={d:.3e}")
    return []


def _run_scan_n(p, jobs):
    res = scan_mean_photon(p["theta"], p["n_grid"], p["g"], jobs=jobs)
    fit = res.fits["jc"]
    print(f"scan-n: slope={fit.slope:.6f} r_squared={fit.r_squared:.6f}")
    return res.records


def _run_scan_area(p, jobs):
    geoms = [BeamGeometry(a, p["omega"], p["k"], p["photons_per_area"]) for a in p["areas"]]
    recs = scan_beam_area(geoms, p["theta"], p["gamma"], jobs=jobs)
    jc = sorted((r for r in recs if r.model == "jc"), key=lambda r: r.area)
    col = {r.outputs() for r in recs if r.model == "collision"}
    ratios = [b.infidelity / a.infidelity for a, b in zip(jc, jc[1:])]
    print(f"scan-area: jc_infidelity_ratios={','.join(f'{x:.4f}' for x in ratios)} collision_identical={len(col) == 1}")
    return recs


def _run_scan_gamma(p, jobs):
    res = scan_gamma(p["theta"], p["omega"], p["gammas"], jobs=jobs)
    for model, fit in sorted(res.fits.items()):
        print(f"scan-gamma[{model}]: slope={fit.slope:.6e} r_squared={fit.r_squared:.6f}")
    return res.records


def _run_nprime(p, jobs):
    value = n_prime(p["omega"], p["gamma"], p["theta"] / p["omega"], p["k"])
    print(f"nprime: n_prime={value:.6g} inverse={1 / value:.6e}")
    points, recs = n_prime_comparison(p["ratios"], p["gamma"], p["k"], p["theta"], jobs=jobs)
    for pt in points:
        print(f"  omega/gamma={pt.ratio:g}: 1/n'={pt.inverse_n_prime:.4e} infidelity={pt.infidelity:.4e} ratio={pt.agreement:.3f}")
    return recs


RUNNERS = {
    "jc": _run_jc,
    "bloch": _run_bloch,
    "collision": _run_collision,
    "mollow-check": _run_mollow,
    "scan-n": _run_scan_n,
    "scan-area": _run_scan_area,
    "scan-gamma": _run_scan_gamma,
    "nprime": _run_nprime,
}


def run(cfg: RunConfig) -> int:
    try:
        records = RUNNERS[cfg.command](cfg.params, cfg.jobs)
    except (TruncationError, IntegrationStepError, DegenerateFitError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output is not None and records:
        try:
            emit_records(records, cfg.output, cfg.fmt)
        except OSError as exc:
            print(f"error: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {len(records)} records to {cfg.output}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
