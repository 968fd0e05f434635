"""Free-space emission as a collision model.

The travelling field is cut into time bins of length ``dt``.  Each bin is a
fresh single-mode ancilla that meets the atom once through

    H_int = i sqrt(gamma/dt) (s+ b - s- b^dag)

and is then traced out, so nothing emitted ever returns to the atom.  In the
lab frame each bin starts in the coherent state ``|beta sqrt(dt)>``.  In the
displaced (Mollow) frame the bin starts in vacuum and the atom additionally
sees the c-number drive ``i sqrt(gamma) (beta s+ - beta^* s-)``, i.e. a
classical Rabi frequency ``2 sqrt(gamma) |beta|`` with phase ``arg(i beta)``.
Both frames give the same atomic dynamics; the second one stays well defined
as ``gamma -> 0`` at fixed Rabi frequency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from .core import (
    GROUND,
    SIGMA_MINUS,
    SIGMA_PLUS,
    DensityMatrix,
    StateVector,
    TruncationError,
    as_density,
    coherent_state,
    destroy,
    evolve,
    kron,
    partial_trace,
    propagator,
    rabi_rotation,
    trace_distance,
    truncation_for,
)
from .jaynes_cummings import jc_hamiltonian
from .semiclassical import PulseSpec, bloch_evolve, drive_frame

__all__ = [
    "MAX_BIN_PHOTONS",
    "MAX_BIN_DECAY",
    "TRUNCATION_WARN",
    "CollisionConfig",
    "CollisionResult",
    "TruncationWarning",
    "ancilla_levels",
    "collision_unitary",
    "collision_run",
    "mollow_frame_run",
    "no_jump_probability",
    "mollow_displacement_check",
    "lindblad_distance",
    "gate_dt",
    "collision_gate",
]

MAX_BIN_PHOTONS = 0.05
MAX_BIN_DECAY = 0.05
TRUNCATION_WARN = 1e-8


class TruncationWarning(UserWarning):
    pass


def ancilla_levels(bin_photons: float, floor: int = 3, tol: float = 1e-9) -> int:
    """Smallest cutoff >= ``floor`` whose Poisson weight at the top level is below ``tol``."""
    n = floor
    while poisson.pmf(n, bin_photons) > tol:
        n += 1
    return n


@dataclass(frozen=True)
class CollisionConfig:
    gamma: float
    beta: complex
    dt: float
    steps: int
    n_anc: int = 3

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "n_anc", int(self.n_anc))
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and nonnegative, got {self.gamma!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.n_anc < 1:
            raise ValueError("n_anc must be at least 1")
        if self.bin_photons >= MAX_BIN_PHOTONS:
            raise ValueError(
                f"beta: |beta|^2 dt = {self.bin_photons:.6g} must be < {MAX_BIN_PHOTONS}"
            )
        if self.gamma * self.dt >= MAX_BIN_DECAY:
            raise ValueError(
                f"gamma: gamma*dt = {self.gamma * self.dt:.6g} must be < {MAX_BIN_DECAY}"
            )

    @classmethod
    def from_rabi(cls, omega, gamma, dt, steps, n_anc=None, phase=0.0) -> "CollisionConfig":
        """Config whose effective drive is ``(omega/2)(e^{i phase} s+ + h.c.)``."""
        if gamma <= 0:
            raise ValueError("the lab-frame model needs gamma > 0 to carry a finite drive")
        beta = -1j * omega / (2 * math.sqrt(gamma)) * np.exp(1j * phase)
        if n_anc is None:
            n_anc = ancilla_levels(abs(beta) ** 2 * dt)
        return cls(gamma=gamma, beta=beta, dt=dt, steps=steps, n_anc=n_anc)

    @property
    def bin_photons(self) -> float:
        return abs(self.beta) ** 2 * self.dt

    @property
    def omega_eff(self) -> float:
        return 2 * math.sqrt(self.gamma) * abs(self.beta)

    @property
    def drive_phase(self) -> float:
        return float(np.angle(1j * self.beta)) if self.beta != 0 else 0.0

    @property
    def duration(self) -> float:
        return self.steps * self.dt


@dataclass(frozen=True)
class CollisionResult:
    """Atom trajectory sampled after every bin (index 0 is the initial state)."""

    times: np.ndarray
    rhos: np.ndarray = field(repr=False)
    survival: np.ndarray = field(repr=False)
    emitted: np.ndarray = field(repr=False)
    max_top_population: float = 0.0

    def atom(self, k: int = -1) -> DensityMatrix:
        return DensityMatrix((2,), self.rhos[k])

    @property
    def final(self) -> DensityMatrix:
        return self.atom(-1)


def _coupling(gamma: float, dt: float, n_anc: int) -> np.ndarray:
    b = destroy(n_anc + 1)
    return 1j * math.sqrt(gamma / dt) * (kron(SIGMA_PLUS, b) - kron(SIGMA_MINUS, b.conj().T))


def collision_unitary(gamma: float, dt: float, n_anc: int = 3) -> np.ndarray:
    """One-bin propagator on ``atom (x) Fock(0..n_anc)``."""
    if gamma == 0:
        return np.eye(2 * (n_anc + 1), dtype=complex)
    return propagator(_coupling(gamma, dt, n_anc), dt)


def _kraus(u: np.ndarray, ancilla: np.ndarray) -> np.ndarray:
    n = ancilla.size
    return np.einsum("imjn,n->mij", u.reshape(2, n, 2, n), ancilla)


def _simulate(u, ancilla, steps, dt, atom_init) -> CollisionResult:
    n = ancilla.size
    kraus = _kraus(u, ancilla)
    # no-jump branch: the outgoing bin is found in its incoming state
    k0 = np.einsum("m,mij->ij", ancilla.conj(), kraus)
    # photons scattered into the bin, counted relative to the incoming amplitude
    b = destroy(n) - np.vdot(ancilla, destroy(n) @ ancilla) * np.eye(n)
    number = b.conj().T @ b
    effect = np.einsum("pm,pji,mjk->ik", number, kraus.conj(), kraus)
    top = kraus[-1].conj().T @ kraus[-1]
    kraus_h = kraus.conj().transpose(0, 2, 1)

    rho = as_density(atom_init).elements.copy()
    branch = rho.copy()
    rhos = np.empty((steps + 1, 2, 2), dtype=complex)
    survival = np.empty(steps + 1)
    emitted = np.empty(steps + 1)
    rhos[0], survival[0], emitted[0] = rho, 1.0, 0.0
    worst = 0.0
    for k in range(1, steps + 1):
        worst = max(worst, np.trace(top @ rho).real)
        emitted[k] = emitted[k - 1] + np.trace(effect @ rho).real
        rho = np.einsum("mij,jk,mkl->il", kraus, rho, kraus_h)
        rho = 0.5 * (rho + rho.conj().T)
        branch = k0 @ branch @ k0.conj().T
        rhos[k] = rho
        survival[k] = np.trace(branch).real
    if worst > TRUNCATION_WARN:
        warnings.warn(
            f"ancilla population at the cutoff reached {worst:.3g}; increase n_anc",
            TruncationWarning,
            stacklevel=3,
        )
    return CollisionResult(np.arange(steps + 1) * dt, rhos, survival, emitted, worst)


def collision_run(cfg: CollisionConfig, atom_init=GROUND) -> CollisionResult:
    """Lab frame: every bin arrives in ``|beta sqrt(dt)>`` and is traced out after one collision."""
    ancilla = coherent_state(cfg.beta * math.sqrt(cfg.dt), cfg.n_anc, tail_tol=1.0).amplitudes
    u = collision_unitary(cfg.gamma, cfg.dt, cfg.n_anc)
    return _simulate(u, ancilla, cfg.steps, cfg.dt, atom_init)


def mollow_frame_run(omega, gamma, dt, steps, atom_init=GROUND, n_anc=3, phase=0.0) -> CollisionResult:
    """Displaced frame: vacuum bins plus a classical drive of Rabi frequency ``omega``.

    Valid for ``gamma = 0``, where the lab-frame amplitude would diverge.
    """
    if gamma < 0 or omega < 0 or dt <= 0:
        raise ValueError("need gamma >= 0, omega >= 0, dt > 0")
    if gamma * dt >= MAX_BIN_DECAY:
        raise ValueError(f"gamma: gamma*dt = {gamma * dt:.6g} must be < {MAX_BIN_DECAY}")
    h = np.zeros((2 * (n_anc + 1),) * 2, dtype=complex)
    if gamma:
        h += _coupling(gamma, dt, n_anc)
    drive = 0.5 * omega * (np.exp(1j * phase) * SIGMA_PLUS + np.exp(-1j * phase) * SIGMA_MINUS)
    h += kron(drive, np.eye(n_anc + 1))
    u = propagator(h, dt)
    vacuum = np.zeros(n_anc + 1, dtype=complex)
    vacuum[0] = 1.0
    return _simulate(u, vacuum, int(steps), dt, atom_init)


def no_jump_probability(cfg: CollisionConfig, atom_init, t: float) -> float:
    """Probability that every bin up to ``t`` leaves in its incoming state.

    In the displaced frame this is the probability that the scattered field
    is still vacuum.
    """
    steps = _steps_for(t, cfg.dt)
    if cfg.gamma == 0:
        return 1.0
    run = CollisionConfig(cfg.gamma, cfg.beta, cfg.dt, steps, cfg.n_anc)
    return float(collision_run(run, atom_init).survival[-1])


def _steps_for(t: float, dt: float) -> int:
    steps = int(round(t / dt))
    if abs(steps * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"t={t!r} is not a whole number of bins of dt={dt!r}")
    return steps


def mollow_displacement_check(alpha, g: float = 1.0, t: float = 1.0, n_max: int | None = None, atom_init=GROUND) -> float:
    """Trace distance between the reduced atom states of
    (A) ``|alpha> (x) atom`` under ``H_JC`` and
    (B) ``|0> (x) atom`` under ``H_JC + g (alpha s+ + alpha^* s-)``.
    """
    alpha = complex(getattr(alpha, "alpha", alpha))
    n_mean = abs(alpha) ** 2
    rule = truncation_for(n_mean, spread=10.0, pad=15.0)
    n_max = rule if n_max is None else int(n_max)
    if n_max < rule:
        raise TruncationError(f"n_max={n_max} below displacement headroom {rule}")
    atom = np.asarray(atom_init, dtype=complex)
    atom = atom / np.linalg.norm(atom)
    h = jc_hamiltonian(g, n_max)
    field_a = coherent_state(alpha, n_max).amplitudes
    vacuum = coherent_state(0, n_max).amplitudes
    dims = (2, n_max + 1)
    psi_a = evolve(h, StateVector.normalized(dims, np.kron(atom, field_a)), t)
    shift = g * (alpha * SIGMA_PLUS + alpha.conjugate() * SIGMA_MINUS)
    h_b = h + kron(shift, np.eye(n_max + 1))
    psi_b = evolve(h_b, StateVector.normalized(dims, np.kron(atom, vacuum)), t)
    return trace_distance(partial_trace(psi_a, 0), partial_trace(psi_b, 0))


def lindblad_distance(cfg: CollisionConfig, pulse: PulseSpec, t: float, atom_init=GROUND) -> float:
    """Trace distance at ``t`` between the collision model and the Bloch equations."""
    if not math.isclose(pulse.omega, cfg.omega_eff, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"omega: pulse {pulse.omega!r} != collision {cfg.omega_eff!r}")
    if not math.isclose(pulse.gamma, cfg.gamma, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"gamma: pulse {pulse.gamma!r} != collision {cfg.gamma!r}")
    steps = _steps_for(t, cfg.dt)
    run = CollisionConfig(cfg.gamma, cfg.beta, cfg.dt, steps, cfg.n_anc)
    col = collision_run(run, atom_init).final
    phase = cfg.drive_phase
    start = drive_frame(as_density(atom_init), -phase)
    ref = bloch_evolve(start, pulse, [t])[-1]
    return trace_distance(col, DensityMatrix((2,), drive_frame(ref, phase)))


def gate_dt(omega: float, gamma: float, theta: float, dt_omega: float = 1e-3, bin_photons: float = 0.04) -> tuple[float, int]:
    """Bin width and count for a pulse of area ``theta``.

    Uses ``dt = dt_omega / omega``, shrunk where needed so the lab-frame
    bins carry fewer than ``bin_photons`` photons, then snapped so the pulse
    is a whole number of bins.
    """
    if omega <= 0 or theta <= 0:
        raise ValueError("omega and theta must be positive")
    dt = dt_omega / omega
    if gamma > 0:
        dt = min(dt, bin_photons * 4 * gamma / omega**2, 0.5 * MAX_BIN_DECAY / gamma)
    duration = theta / omega
    steps = max(1, math.ceil(duration / dt - 1e-9))
    return duration / steps, steps


def collision_gate(omega: float, gamma: float, theta: float, dt: float | None = None, atom_init=GROUND, n_anc: int | None = None):
    """Run a pulse of area ``theta`` through the collision model.

    Uses the lab frame (quantized coherent bins) when ``gamma > 0`` and the
    displaced frame otherwise.  Returns ``(result, ideal_target, dt)``.
    """
    if dt is None:
        dt, steps = gate_dt(omega, gamma, theta)
    else:
        steps = _steps_for(theta / omega, dt)
    atom = np.asarray(atom_init, dtype=complex)
    target = rabi_rotation(theta) @ atom
    if gamma > 0:
        cfg = CollisionConfig.from_rabi(omega, gamma, dt, steps, n_anc=n_anc)
        res = collision_run(cfg, atom)
    else:
        res = mollow_frame_run(omega, 0.0, dt, steps, atom, n_anc=n_anc or 3)
    return res, target, dt
