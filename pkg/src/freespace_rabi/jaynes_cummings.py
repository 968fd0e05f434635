"""Resonant single-mode Jaynes-Cummings dynamics with a coherent-state field.

``H = g (a sigma_+ + a^dag sigma_-)`` couples ``|g, n+1>`` to ``|e, n>`` with
matrix element ``g sqrt(n+1)``, so every excitation manifold evolves as an
independent 2x2 rotation.  The joint state is the Poisson-weighted sum of
these block solutions; the state is stored in the ``atom (x) field`` basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import argrelmax

from .core import (
    NORM_TOL,
    CoherentAmplitude,
    DensityMatrix,
    StateVector,
    TruncationError,
    coherent_state,
    destroy,
    fidelity,
    kron,
    partial_trace,
    rabi_rotation,
    truncation_for,
    von_neumann_entropy,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    GROUND,
)

__all__ = [
    "JCConfig",
    "JCResult",
    "jc_hamiltonian",
    "jc_block_evolve",
    "jc_evolve",
    "jc_gate_time",
    "jc_gate_infidelity",
    "revival_time",
]


@dataclass(frozen=True)
class JCConfig:
    g: float
    alpha: CoherentAmplitude
    n_max: int | None = None
    atom_init: np.ndarray = field(default_factory=lambda: GROUND.copy(), repr=False)

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g!r}")
        alpha = self.alpha if isinstance(self.alpha, CoherentAmplitude) else CoherentAmplitude(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        rule = truncation_for(alpha.mean_photons)
        n_max = rule if self.n_max is None else int(self.n_max)
        if n_max < rule:
            raise TruncationError(
                f"n_max={n_max} below truncation rule {rule} for <n>={alpha.mean_photons:.6g}"
            )
        object.__setattr__(self, "n_max", n_max)
        atom = np.asarray(self.atom_init, dtype=complex).reshape(-1)
        if atom.size != 2 or abs(np.linalg.norm(atom) - 1) > NORM_TOL:
            raise ValueError("atom_init must be a normalized 2-vector")
        atom.setflags(write=False)
        object.__setattr__(self, "atom_init", atom)

    @property
    def n_mean(self) -> float:
        return self.alpha.mean_photons

    @property
    def mean_rabi(self) -> float:
        """Mean-field Rabi frequency ``2 g sqrt(<n>)``."""
        return 2 * self.g * math.sqrt(self.n_mean)


@dataclass(frozen=True)
class JCResult:
    times: np.ndarray
    states: list[StateVector] = field(repr=False)
    atom: list[DensityMatrix] = field(repr=False)
    inversion: np.ndarray
    entropy: np.ndarray
    excitation: np.ndarray
    infidelity: np.ndarray | None = None


def jc_hamiltonian(g: float, n_max: int) -> np.ndarray:
    """Truncated JC Hamiltonian on ``atom (x) Fock(0..n_max)``."""
    a = destroy(n_max + 1)
    return g * (kron(SIGMA_PLUS, a) + kron(SIGMA_MINUS, a.conj().T))


def jc_block_evolve(n: int, atom_init, g: float, t: float) -> np.ndarray:
    """Closed-form evolution of ``atom_init (x) |n>``.

    Returns amplitudes on ``(|g,n>, |e,n-1>, |e,n>, |g,n+1>)``.  For ``n = 0``
    the ``|e,-1>`` slot is always zero.
    """
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    cg, ce = np.asarray(atom_init, dtype=complex)
    lo = g * math.sqrt(n) * t
    hi = g * math.sqrt(n + 1) * t
    return np.array(
        [
            cg * math.cos(lo),
            -1j * cg * math.sin(lo),
            ce * math.cos(hi),
            -1j * ce * math.sin(hi),
        ]
    )


def _joint_amplitudes(field_amps: np.ndarray, atom: np.ndarray, g: float, t: float) -> np.ndarray:
    # vectorized jc_block_evolve over all n; |e, n_max> has no partner inside the truncation
    n_levels = field_amps.size
    n = np.arange(n_levels)
    cg, ce = atom
    lo = g * np.sqrt(n) * t
    hi = g * np.sqrt(n + 1) * t
    hi[-1] = 0.0
    amp_g = cg * field_amps * np.cos(lo)
    amp_e = ce * field_amps * np.cos(hi)
    amp_e[:-1] += -1j * cg * field_amps[1:] * np.sin(lo[1:])
    amp_g[1:] += -1j * ce * field_amps[:-1] * np.sin(hi[:-1])
    return np.concatenate([amp_g, amp_e])


def jc_evolve(cfg: JCConfig, times, target=None) -> JCResult:
    """Evolve the coherent-state JC problem on a time grid.

    If ``target`` (a 2-vector per sample, or a callable ``t -> 2-vector``) is
    given, the infidelity of the reduced atom state against it is recorded.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    field_amps = coherent_state(cfg.alpha, cfg.n_max).amplitudes
    n_levels = cfg.n_max + 1
    dims = (2, n_levels)
    photons = np.tile(np.arange(n_levels, dtype=float), 2)
    photons[n_levels:] += 1.0

    states, atoms = [], []
    inversion = np.empty(times.size)
    entropy = np.empty(times.size)
    excitation = np.empty(times.size)
    infid = None if target is None else np.empty(times.size)
    for k, t in enumerate(times):
        psi = StateVector.normalized(dims, _joint_amplitudes(field_amps, cfg.atom_init, cfg.g, t))
        rho = partial_trace(psi, 0)
        states.append(psi)
        atoms.append(rho)
        # physics convention: inversion = P_e - P_g
        inversion[k] = -np.trace(SIGMA_Z @ rho.elements).real
        entropy[k] = von_neumann_entropy(rho)
        excitation[k] = float(np.sum(photons * np.abs(psi.amplitudes) ** 2))
        if target is not None:
            tgt = target(t) if callable(target) else target
            infid[k] = max(0.0, 1.0 - fidelity(rho, tgt))
    return JCResult(times, states, atoms, inversion, entropy, excitation, infid)


def jc_gate_time(cfg: JCConfig, theta: float) -> float:
    """Duration ``theta / (2 g sqrt(<n>))`` matching a classical pulse of area theta."""
    if cfg.n_mean <= 0:
        raise ValueError("gate needs a nonempty field (<n> > 0)")
    return theta / cfg.mean_rabi


def jc_gate_infidelity(cfg: JCConfig, theta: float) -> float:
    """``1 - F`` of the reduced atom state against the classical rotation by theta."""
    if theta < 0:
        raise ValueError("pulse area must be nonnegative")
    t = jc_gate_time(cfg, theta)
    ideal = rabi_rotation(theta, np.angle(cfg.alpha.alpha)) @ cfg.atom_init
    res = jc_evolve(cfg, [t], target=ideal)
    return float(res.infidelity[0])


def revival_time(times, inversion, predicted: float, mean_rabi: float, search: float = 0.4) -> float:
    """Locate the revival peak of the inversion envelope.

    The envelope is sampled at local maxima of ``|inversion|`` after a
    sliding-window maximum of width ``4 pi / mean_rabi``; the largest sample
    within ``predicted * (1 +/- search)`` is returned.
    """
    times = np.asarray(times, dtype=float)
    mag = np.abs(np.asarray(inversion, dtype=float))
    dt = times[1] - times[0]
    half = max(1, int(round(2 * math.pi / mean_rabi / dt)))
    padded = np.pad(mag, half, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * half + 1)
    envelope = windows.max(axis=1)
    peaks = argrelmax(mag)[0]
    # keep only maxima that dominate their window: these sample the envelope
    peaks = peaks[mag[peaks] >= envelope[peaks]]
    peaks = peaks[np.abs(times[peaks] - predicted) <= search * predicted]
    if peaks.size == 0:
        raise ValueError("no envelope maxima inside the search window")
    return float(times[peaks[np.argmax(mag[peaks])]])
