"""Dense quantum-state primitives: states, tensor products, partial traces,
coherent states, propagators and the usual state diagnostics.

Conventions
-----------
* Atom basis is ``(|g>, |e>)``; ``SIGMA_PLUS = |e><g|``.
* Composite spaces are ordered left to right as passed in ``dims``
  (C-order, first subsystem most significant).
* Coherent states are normalized with ``exp(-|alpha|^2 / 2)``.  The
  prefactor ``exp(-|alpha|^2)`` sometimes quoted in the literature leaves
  the state unnormalized and is treated as a typo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

__all__ = [
    "NORM_TOL",
    "HERMITIAN_TOL",
    "PSD_FLOOR",
    "TruncationError",
    "StateVector",
    "DensityMatrix",
    "CoherentAmplitude",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "GROUND",
    "EXCITED",
    "destroy",
    "kron",
    "partial_trace",
    "truncation_for",
    "coherent_state",
    "displacement_operator",
    "propagator",
    "evolve",
    "fidelity",
    "infidelity",
    "purity",
    "von_neumann_entropy",
    "trace_distance",
    "rabi_rotation",
    "as_density",
]

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_FLOOR = -1e-9
COHERENT_TAIL_TOL = 1e-10


class TruncationError(ValueError):
    """Fock-space truncation too small for the requested state or operator."""


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

GROUND = np.array([1, 0], dtype=complex)
EXCITED = np.array([0, 1], dtype=complex)


def _dims_tuple(dims: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise ValueError(f"invalid subsystem dimensions {dims!r}")
    return out


@dataclass(frozen=True)
class StateVector:
    """Normalized ket on a tensor-product space."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _dims_tuple(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise ValueError(
                f"amplitude count {amps.size} does not match dims {dims}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, dims, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(dims, amps / np.linalg.norm(amps))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    dims: tuple[int, ...]
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _dims_tuple(self.dims)
        rho = np.array(self.elements, dtype=complex)
        d = math.prod(dims)
        if rho.shape != (d, d):
            raise ValueError(f"matrix shape {rho.shape} does not match dims {dims}")
        herm_err = np.max(np.abs(rho - rho.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian (max defect {herm_err:.3g})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        lo = np.linalg.eigvalsh(rho)[0]
        if lo < PSD_FLOOR:
            raise ValueError(f"density matrix not positive (min eigenvalue {lo:.3g})")
        rho.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True)
class CoherentAmplitude:
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2

    @classmethod
    def from_mean_photons(cls, n_mean: float, phase: float = 0.0) -> "CoherentAmplitude":
        if n_mean < 0:
            raise ValueError("mean photon number must be nonnegative")
        return cls(math.sqrt(n_mean) * np.exp(1j * phase))


def _alpha(a) -> complex:
    return a.alpha if isinstance(a, CoherentAmplitude) else complex(a)


def as_density(state) -> DensityMatrix:
    """Coerce a ket, StateVector, matrix or DensityMatrix to a DensityMatrix."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, StateVector):
        return state.density()
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return StateVector.normalized((arr.size,), arr).density()
    return DensityMatrix((arr.shape[0],), arr)


def destroy(n_levels: int) -> np.ndarray:
    """Annihilation operator on ``n_levels`` Fock states (0 .. n_levels-1)."""
    return np.diag(np.sqrt(np.arange(1, n_levels)), 1).astype(complex)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho, keep: int) -> DensityMatrix:
    """Reduced state on subsystem ``keep``.

    Accepts a DensityMatrix or, for pure states, a StateVector; the latter
    avoids forming the full joint density matrix.
    """
    dims = rho.dims
    if len(dims) < 2:
        raise ValueError("partial trace needs at least two subsystems")
    if not (0 <= keep < len(dims)) or isinstance(keep, bool):
        raise IndexError(f"subsystem index {keep!r} out of range for dims {dims}")
    if isinstance(rho, StateVector):
        psi = np.moveaxis(rho.amplitudes.reshape(dims), keep, 0).reshape(dims[keep], -1)
        red = psi @ psi.conj().T
    else:
        n = len(dims)
        t = rho.elements.reshape(dims + dims)
        letters = "abcdefghijklmnopqrstuvwxyz"
        row = list(letters[:n])
        col = list(letters[n : 2 * n])
        for i in range(n):
            if i != keep:
                col[i] = row[i]
        spec = "".join(row) + "".join(col) + "->" + row[keep] + col[keep]
        red = np.einsum(spec, t)
    return DensityMatrix((dims[keep],), red)


def truncation_for(n_mean: float, spread: float = 8.0, pad: float = 10.0) -> int:
    """Default Fock cutoff ``ceil(<n> + spread*sqrt(<n>) + pad)``."""
    return int(math.ceil(n_mean + spread * math.sqrt(n_mean) + pad))


def _coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    if alpha == 0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    r, phi = abs(alpha), np.angle(alpha)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * phi * n)


def coherent_state(alpha, n_max: int | None = None, tail_tol: float = COHERENT_TAIL_TOL) -> StateVector:
    """Truncated coherent state ``|alpha>`` on Fock levels 0..n_max.

    Raises TruncationError when the Poisson mass above ``n_max`` exceeds
    ``tail_tol``; otherwise the truncated vector is renormalized.
    """
    a = _alpha(alpha)
    n_mean = abs(a) ** 2
    if n_max is None:
        n_max = truncation_for(n_mean)
    if n_max < 0:
        raise TruncationError("n_max must be nonnegative")
    amps = _coherent_amplitudes(a, n_max)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if tail > tail_tol:
        raise TruncationError(
            f"n_max={n_max} too small for <n>={n_mean:.6g}: tail mass {tail:.3g}"
        )
    return StateVector.normalized((n_max + 1,), amps)


def displacement_operator(alpha, n_max: int) -> np.ndarray:
    """Displacement ``D(alpha) = exp(alpha a^dag - alpha^* a)`` cropped to 0..n_max.

    The exponential is taken on an enlarged Fock space and then cropped, so
    matrix elements between low-lying levels are accurate.
    """
    a = _alpha(alpha)
    r = abs(a)
    try:
        coherent_state(a, n_max)
    except TruncationError as exc:
        raise TruncationError(f"displacement: {exc}") from None
    work = n_max + int(math.ceil(r * r + 12 * r + 30))
    b = destroy(work + 1)
    gen = a * b.conj().T - a.conjugate() * b
    # gen is anti-Hermitian: D = exp(-i H) with H = i*gen Hermitian
    d = propagator(1j * gen, 1.0, check=False)
    return d[: n_max + 1, : n_max + 1]


def propagator(h, t: float, check: bool = True) -> np.ndarray:
    """``exp(-i h t)`` by Hermitian eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if check:
        defect = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
        if defect > HERMITIAN_TOL:
            raise ValueError(f"Hamiltonian not Hermitian (max defect {defect:.3g})")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve(h, psi: StateVector, t: float) -> StateVector:
    u = propagator(h, t)
    if u.shape[0] != len(psi):
        raise ValueError("Hamiltonian and state dimensions differ")
    return StateVector.normalized(psi.dims, u @ psi.amplitudes)


def _target_vec(target) -> np.ndarray:
    return target.amplitudes if isinstance(target, StateVector) else np.asarray(target, dtype=complex)


def fidelity(rho, target) -> float:
    """``<target| rho |target>`` for a pure target."""
    r = as_density(rho)
    v = _target_vec(target)
    if v.size != r.dim:
        raise ValueError(f"dimension mismatch: state {r.dim}, target {v.size}")
    f = np.vdot(v, r.elements @ v).real
    return float(min(1.0, max(0.0, f)))


def infidelity(rho, target) -> float:
    return max(0.0, 1.0 - fidelity(rho, target))


def purity(rho) -> float:
    r = as_density(rho).elements
    return float(np.real(np.sum(r * r.T)))


def von_neumann_entropy(rho) -> float:
    """Entropy in nats."""
    w = np.linalg.eigvalsh(as_density(rho).elements)
    w = w[w > 1e-15]
    return float(max(0.0, -np.sum(w * np.log(w))))


def trace_distance(rho, sigma) -> float:
    a = as_density(rho).elements
    b = as_density(sigma).elements
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def rabi_rotation(theta: float, phase: float = 0.0) -> np.ndarray:
    """Ideal classical-drive gate ``exp(-i theta/2 (e^{i phase} s+ + e^{-i phase} s-))``.

    ``phase = 0`` gives ``exp(-i theta sigma_x / 2)``.
    """
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * s * np.exp(-1j * phase)], [-1j * s * np.exp(1j * phase), c]],
        dtype=complex,
    )
