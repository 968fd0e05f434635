"""Two-level atom driven by a quantized coherent pulse: single-mode
Jaynes-Cummings, optical Bloch, and free-space collision models."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    CoherentAmplitude,
    DensityMatrix,
    StateVector,
    TruncationError,
    coherent_state,
    displacement_operator,
    evolve,
    fidelity,
    kron,
    partial_trace,
    purity,
    trace_distance,
    von_neumann_entropy,
)
