"""Classically driven two-level atom with spontaneous decay (optical Bloch equations).

    drho/dt = -i[H, rho] + gamma (s- rho s+ - 1/2 {s+ s-, rho}),   H = (Omega/2) sigma_x

Integrated with a fixed-step classical RK4 so results are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    GROUND,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    as_density,
    infidelity,
    rabi_rotation,
)

__all__ = [
    "IntegrationStepError",
    "PulseSpec",
    "bloch_derivative",
    "bloch_evolve",
    "bloch_final_state",
    "bloch_gate_infidelity",
    "default_step",
    "drive_frame",
]

_PROJ_E = SIGMA_PLUS @ SIGMA_MINUS


class IntegrationStepError(RuntimeError):
    """Integrated state left the set of valid density matrices."""


@dataclass(frozen=True)
class PulseSpec:
    omega: float
    duration: float
    gamma: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        for name in ("omega", "duration", "gamma"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")
        if self.detuning != 0:
            raise ValueError("only resonant drive (detuning = 0) is supported")

    @classmethod
    def from_area(cls, theta: float, omega: float, gamma: float = 0.0) -> "PulseSpec":
        if omega <= 0:
            raise ValueError("omega must be positive to realize a pulse area")
        return cls(omega=omega, duration=theta / omega, gamma=gamma)

    @property
    def area(self) -> float:
        return self.omega * self.duration

    @property
    def strength(self) -> float:
        """``omega / gamma``; ``inf`` without decay."""
        return math.inf if self.gamma == 0 else self.omega / self.gamma


def bloch_derivative(rho, pulse: PulseSpec) -> np.ndarray:
    r = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    h = 0.5 * pulse.omega * SIGMA_X
    out = -1j * (h @ r - r @ h)
    if pulse.gamma:
        out += pulse.gamma * (
            SIGMA_MINUS @ r @ SIGMA_PLUS - 0.5 * (_PROJ_E @ r + r @ _PROJ_E)
        )
    return out


def default_step(pulse: PulseSpec) -> float:
    """``0.01 * min(1/Omega, 1/gamma)``, ignoring rates that are zero."""
    rates = [r for r in (pulse.omega, pulse.gamma) if r > 0]
    return 0.01 / max(rates) if rates else math.inf


def _rk4(r: np.ndarray, pulse: PulseSpec, span: float, h_max: float) -> np.ndarray:
    if span <= 0:
        return r
    n = max(1, math.ceil(span / h_max - 1e-9))
    h = span / n
    f = lambda x: bloch_derivative(x, pulse)  # noqa: E731
    for _ in range(n):
        k1 = f(r)
        k2 = f(r + 0.5 * h * k1)
        k3 = f(r + 0.5 * h * k2)
        k4 = f(r + h * k3)
        r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return r


def bloch_evolve(rho0, pulse: PulseSpec, times, step: float | None = None) -> list[DensityMatrix]:
    """Density matrices at ``times`` (sorted, >= 0) starting from ``rho0`` at t = 0."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and nondecreasing")
    h_max = default_step(pulse) if step is None else float(step)
    r = as_density(rho0).elements.copy()
    out, t_prev = [], 0.0
    for t in times:
        r = _rk4(r, pulse, t - t_prev, h_max)
        t_prev = t
        try:
            out.append(DensityMatrix((2,), r))
        except ValueError as exc:
            raise IntegrationStepError(f"at t={t:.6g}: {exc}") from None
    return out


def bloch_final_state(pulse: PulseSpec, rho0=GROUND) -> DensityMatrix:
    return bloch_evolve(rho0, pulse, [pulse.duration])[-1]


def drive_frame(rho, phase: float) -> np.ndarray:
    """Map a state from the sigma_x-drive frame to a drive of the given phase.

    Conjugation by ``diag(1, e^{i phase})`` rotates the drive axis and leaves
    the decay channel invariant.
    """
    r = as_density(rho).elements
    u = np.diag([1.0, np.exp(1j * phase)])
    return u @ r @ u.conj().T


def bloch_gate_infidelity(pulse: PulseSpec, atom_init=GROUND) -> float:
    """``1 - F`` against the ideal rotation ``exp(-i area sigma_x / 2)``."""
    init = np.asarray(atom_init, dtype=complex)
    final = bloch_evolve(init, pulse, [pulse.duration])[-1]
    return infidelity(final, rabi_rotation(pulse.area) @ init)
