"""Parameter scans comparing the single-mode, semiclassical and collision models.

* ``scan_mean_photon``: JC gate infidelity against mean photon number.
* ``scan_beam_area``: fixed local Rabi frequency, growing beam area.
* ``scan_gamma``: Bloch and collision infidelity against decay rate.
* ``n_prime`` / ``n_prime_comparison``: photon count in the effective
  interaction volume against the measured free-space infidelity.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .collision import collision_gate
from .core import CoherentAmplitude, infidelity, purity, rabi_rotation, von_neumann_entropy
from .jaynes_cummings import JCConfig, jc_evolve, jc_gate_time
from .records import ScanRecord, emit_records, read_records  # noqa: F401  (re-export)
from .semiclassical import PulseSpec, bloch_evolve

__all__ = [
    "DegenerateFitError",
    "FitResult",
    "BeamGeometry",
    "ScanResult",
    "fit_power_law",
    "fit_through_origin",
    "jc_point",
    "bloch_point",
    "collision_point",
    "scan_mean_photon",
    "scan_beam_area",
    "scan_gamma",
    "effective_cross_section",
    "resonant_cross_section",
    "n_prime",
    "NPrimePoint",
    "n_prime_comparison",
    "emit_records",
    "read_records",
]


class DegenerateFitError(ValueError):
    """Fit inputs carry no information (e.g. all-zero infidelities)."""


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    residuals: tuple[float, ...]


@dataclass(frozen=True)
class BeamGeometry:
    """Beam cross-section at fixed on-axis Rabi frequency.

    ``photons_per_area`` converts area to mean photon number at this Rabi
    frequency; only ratios of areas matter for the scan.
    """

    area: float
    omega: float
    wavenumber: float = 2 * math.pi
    photons_per_area: float = 100.0

    def __post_init__(self):
        if not (self.area > 0 and self.wavenumber > 0 and self.omega > 0 and self.photons_per_area > 0):
            raise ValueError("area, omega, wavenumber and photons_per_area must be positive")

    @property
    def n_mean(self) -> float:
        return self.photons_per_area * self.area

    def pulse_duration(self, theta: float) -> float:
        return theta / self.omega


@dataclass(frozen=True)
class ScanResult:
    records: list[ScanRecord]
    fits: dict[str, FitResult]


def _r_squared(y, pred) -> float:
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def fit_power_law(x, y, floor: float = 1e-12) -> FitResult:
    """Least squares on ``log y = slope * log x + intercept``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0):
        raise DegenerateFitError("need at least two positive abscissae")
    if np.any(y < floor):
        raise DegenerateFitError(f"values below {floor:g} cannot be fitted on a log scale")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    return FitResult(float(slope), float(intercept), _r_squared(ly, pred), tuple(float(r) for r in ly - pred))


def fit_through_origin(x, y) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    denom = float(np.dot(x, x))
    if denom == 0:
        raise DegenerateFitError("all abscissae are zero")
    slope = float(np.dot(x, y)) / denom
    pred = slope * x
    return FitResult(slope, 0.0, _r_squared(y, pred), tuple(float(r) for r in y - pred))


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _diagnostics(rho, target) -> dict:
    return {
        "infidelity": infidelity(rho, target),
        "purity": purity(rho),
        "entropy": von_neumann_entropy(rho),
    }


def jc_point(n_mean: float, theta: float, g: float = 1.0) -> dict:
    """Reduced-state diagnostics of a JC pulse of area theta (atom starts in |g>)."""
    cfg = JCConfig(g=g, alpha=CoherentAmplitude.from_mean_photons(n_mean))
    res = jc_evolve(cfg, [jc_gate_time(cfg, theta)])
    return _diagnostics(res.atom[0], rabi_rotation(theta) @ cfg.atom_init)


def bloch_point(omega: float, gamma: float, theta: float) -> dict:
    pulse = PulseSpec.from_area(theta, omega, gamma)
    rho = bloch_evolve(np.array([1, 0], dtype=complex), pulse, [pulse.duration])[-1]
    return _diagnostics(rho, rabi_rotation(theta)[:, 0])


def collision_point(omega: float, gamma: float, theta: float, dt: float | None = None) -> dict:
    res, target, used_dt = collision_gate(omega, gamma, theta, dt)
    out = _diagnostics(res.final, target)
    out["survival"] = float(res.survival[-1])
    out["dt"] = used_dt
    return out


def _geometric(grid) -> bool:
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0):
        return False
    ratios = g[1:] / g[:-1]
    return bool(np.allclose(ratios, ratios[0], rtol=1e-3))


def _jc_task(args):
    n, theta, g = args
    return jc_point(n, theta, g)


def scan_mean_photon(theta: float, n_grid: Sequence[float], g: float = 1.0, jobs: int = 1) -> ScanResult:
    """JC infidelity on a geometric grid of mean photon numbers plus a log-log fit."""
    n_grid = [float(n) for n in n_grid]
    if len(n_grid) < 4 or not _geometric(n_grid):
        raise ValueError("n_grid needs at least 4 geometrically spaced positive points")
    outs = _map(_jc_task, [(n, theta, g) for n in n_grid], jobs)
    records = [
        ScanRecord("scan-n", "jc", n_mean=n, omega=2 * g * math.sqrt(n), theta=theta, **o)
        for n, o in zip(n_grid, outs)
    ]
    fit = fit_power_law(n_grid, [o["infidelity"] for o in outs])
    return ScanResult(sorted(records, key=ScanRecord.sort_key), {"jc": fit})


def _collision_task(args):
    omega, gamma, theta, dt = args
    return collision_point(omega, gamma, theta, dt)


def scan_beam_area(geometries: Sequence[BeamGeometry], theta: float, gamma: float, dt: float | None = None, jobs: int = 1) -> list[ScanRecord]:
    """JC and collision-model records across beam areas at fixed Rabi frequency.

    The JC coupling is set so that ``2 g sqrt(<n>)`` equals the geometry's
    Rabi frequency; the collision model only ever sees ``(omega, gamma)``.
    """
    geometries = list(geometries)
    omegas = {geo.omega for geo in geometries}
    if len(omegas) != 1:
        raise ValueError("scan_beam_area requires the same Rabi frequency for every geometry")
    jc_args = [(geo.n_mean, theta, geo.omega / (2 * math.sqrt(geo.n_mean))) for geo in geometries]
    jc_outs = _map(_jc_task, jc_args, jobs)
    col_outs = _map(_collision_task, [(geo.omega, gamma, theta, dt) for geo in geometries], jobs)
    records = []
    for geo, jo, co in zip(geometries, jc_outs, col_outs):
        records.append(
            ScanRecord("scan-area", "jc", n_mean=geo.n_mean, area=geo.area, omega=geo.omega, theta=theta, **jo)
        )
        records.append(
            ScanRecord("scan-area", "collision", area=geo.area, gamma=gamma, omega=geo.omega, theta=theta, **co)
        )
    return sorted(records, key=ScanRecord.sort_key)


def _bloch_task(args):
    omega, gamma, theta = args
    return bloch_point(omega, gamma, theta)


def scan_gamma(theta: float, omega: float, gammas: Sequence[float], dt: float | None = None, jobs: int = 1) -> ScanResult:
    """Bloch and collision infidelities against gamma, each with a fit through the origin."""
    gammas = [float(x) for x in gammas]
    if min(gammas) < 0:
        raise ValueError("gamma must be nonnegative")
    if omega < 100 * max(gammas):
        raise ValueError("omega must be at least 100 * max(gamma) (strong-field regime)")
    b_outs = _map(_bloch_task, [(omega, gm, theta) for gm in gammas], jobs)
    c_outs = _map(_collision_task, [(omega, gm, theta, dt) for gm in gammas], jobs)
    records = []
    for gm, bo, co in zip(gammas, b_outs, c_outs):
        records.append(ScanRecord("scan-gamma", "bloch", gamma=gm, omega=omega, theta=theta, **bo))
        records.append(ScanRecord("scan-gamma", "collision", gamma=gm, omega=omega, theta=theta, **co))
    fits = {
        "bloch": fit_through_origin(gammas, [o["infidelity"] for o in b_outs]),
        "collision": fit_through_origin(gammas, [o["infidelity"] for o in c_outs]),
    }
    return ScanResult(sorted(records, key=ScanRecord.sort_key), fits)


def effective_cross_section(k: float) -> float:
    """``3 pi / (2 k^2)``."""
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    return 3 * math.pi / (2 * k * k)


def resonant_cross_section(k: float) -> float:
    """Resonant two-level scattering cross-section ``6 pi / k^2``."""
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    return 6 * math.pi / (k * k)


def n_prime(omega: float, gamma: float, duration: float, k: float) -> float:
    """Photons crossing the effective cross-section during a rectangular pulse.

    Flux from the weak-saturation relation ``flux * sigma_res = omega^2 / gamma``,
    which reduces the result to ``omega^2 T / (4 gamma)``.
    """
    for name, v in (("omega", omega), ("gamma", gamma), ("duration", duration), ("k", k)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    flux = omega**2 / (gamma * resonant_cross_section(k))
    return flux * effective_cross_section(k) * duration


@dataclass(frozen=True)
class NPrimePoint:
    ratio: float
    n_prime: float
    infidelity: float

    @property
    def inverse_n_prime(self) -> float:
        return 1.0 / self.n_prime

    @property
    def agreement(self) -> float:
        """``(1/n') / infidelity``."""
        return self.inverse_n_prime / self.infidelity


def n_prime_comparison(ratios: Sequence[float], gamma: float = 1.0, k: float = 2 * math.pi, theta: float = math.pi, dt: float | None = None, jobs: int = 1):
    """``1/n'`` against collision-model infidelity for ``omega = ratio * gamma``.

    Returns ``(points, records)``.
    """
    ratios = [float(r) for r in ratios]
    outs = _map(_collision_task, [(r * gamma, gamma, theta, dt) for r in ratios], jobs)
    points, records = [], []
    for r, o in zip(ratios, outs):
        omega = r * gamma
        points.append(NPrimePoint(r, n_prime(omega, gamma, theta / omega, k), o["infidelity"]))
        records.append(ScanRecord("nprime", "collision", gamma=gamma, omega=omega, theta=theta, **o))
    return points, sorted(records, key=ScanRecord.sort_key)
