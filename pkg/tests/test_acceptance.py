"""Exit criteria.  Each test prints one PASS/FAIL line; the lines are also
collected into the pytest terminal summary.

Run standalone with ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, SEEDS, random_density, random_hermitian, random_ket
from freespace_rabi.collision import (
    CollisionConfig,
    lindblad_distance,
    mollow_displacement_check,
    no_jump_probability,
)
from freespace_rabi.core import (
    EXCITED,
    GROUND,
    CoherentAmplitude,
    DensityMatrix,
    StateVector,
    evolve,
    partial_trace,
    von_neumann_entropy,
)
from freespace_rabi.experiments import (
    BeamGeometry,
    n_prime_comparison,
    scan_beam_area,
    scan_gamma,
    scan_mean_photon,
)
from freespace_rabi.jaynes_cummings import JCConfig, jc_evolve, revival_time
from freespace_rabi.records import render
from freespace_rabi.semiclassical import PulseSpec, bloch_evolve


def report(number, title, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail} ({elapsed:.2f}s < {limit:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_1_mollow_identity():
    t0 = time.perf_counter()
    d = [
        mollow_displacement_check(2, 1.0, 1.0, atom_init=GROUND),
        mollow_displacement_check(3, 1.0, 3.0, atom_init=np.array([1, 1]) / math.sqrt(2)),
    ]
    elapsed = time.perf_counter() - t0
    report(1, "Mollow single-mode identity", max(d) <= 1e-8, f"trace distances {d[0]:.1e}, {d[1]:.1e} <= 1e-8", elapsed, 1)


def test_2_inverse_mean_photon_scaling():
    t0 = time.perf_counter()
    res = scan_mean_photon(math.pi / 2, [25, 50, 100, 200, 400])
    elapsed = time.perf_counter() - t0
    slope = res.fits["jc"].slope
    report(2, "1/<n> scaling", abs(slope + 1) <= 0.1, f"slope {slope:.4f} (target -1 +/- 0.1)", elapsed, 10)


def test_3_beam_area_paradox():
    t0 = time.perf_counter()
    geoms = [BeamGeometry(a, omega=50.0, photons_per_area=100.0) for a in (1, 2, 4, 8)]
    recs = scan_beam_area(geoms, math.pi / 2, gamma=1.0)
    elapsed = time.perf_counter() - t0
    jc = sorted((r for r in recs if r.model == "jc"), key=lambda r: r.area)
    ratios = [b.infidelity / a.infidelity for a, b in zip(jc, jc[1:])]
    col = [r.outputs() for r in recs if r.model == "collision"]
    identical = all(c == col[0] for c in col)
    ok = all(abs(r - 0.5) <= 0.05 for r in ratios) and identical
    detail = f"JC ratios {', '.join(f'{r:.4f}' for r in ratios)} (0.5 +/- 10%); collision identical={identical}"
    report(3, "beam-area paradox", ok, detail, elapsed, 30)


def test_4_decoherence_of_order_gamma():
    t0 = time.perf_counter()
    gammas = [1e-4, 3e-4, 1e-3, 3e-3]
    res = scan_gamma(math.pi / 2, 1.0, gammas)
    elapsed = time.perf_counter() - t0
    by = {(r.model, r.gamma): r for r in res.records}
    rel = [abs(by[("collision", g)].infidelity / by[("bloch", g)].infidelity - 1) for g in gammas]
    dt_ok = all(by[("collision", g)].dt <= 1e-3 * (1 + 1e-12) for g in gammas)
    r2 = res.fits["collision"].r_squared
    ok = r2 > 0.99 and max(rel) <= 0.15 and dt_ok
    detail = f"collision R^2 {r2:.6f} > 0.99; max |collision/bloch - 1| = {max(rel):.2e} <= 0.15"
    report(4, "free-space decoherence of order gamma", ok, detail, elapsed, 120)


def test_5_vacuum_survival():
    t0 = time.perf_counter()
    driven = CollisionConfig.from_rabi(20.0, 1.0, 1e-4, 0)
    p = no_jump_probability(driven, GROUND, 1.0)
    dt = 1e-3
    p0 = no_jump_probability(CollisionConfig(1.0, 0.0, dt, 0), EXCITED, 1.0)
    elapsed = time.perf_counter() - t0
    ok = abs(p / math.exp(-0.5) - 1) <= 0.10 and abs(p0 - math.exp(-1)) <= 2 * dt
    detail = f"driven {p:.4f} vs e^-1/2={math.exp(-0.5):.4f} (10%); decay {p0:.5f} vs e^-1 (+/- {2 * dt:g})"
    report(5, "vacuum-survival law", ok, detail, elapsed, 30)


def test_6_collision_to_lindblad_convergence():
    t0 = time.perf_counter()
    pulse = PulseSpec(10.0, 0.5, 1.0)
    d = [lindblad_distance(CollisionConfig.from_rabi(10.0, 1.0, dt, 0), pulse, 0.5) for dt in (1e-3, 5e-4)]
    elapsed = time.perf_counter() - t0
    ratio = d[1] / d[0]
    extrapolated = abs(2 * d[1] - d[0])
    ok = abs(ratio - 0.5) <= 0.15 and extrapolated < 1e-3
    report(6, "collision -> Lindblad convergence", ok, f"ratio {ratio:.4f}; extrapolated {extrapolated:.1e}", elapsed, 120)


def test_7_n_prime_order_of_magnitude():
    t0 = time.perf_counter()
    points, _ = n_prime_comparison([50, 100, 200])
    elapsed = time.perf_counter() - t0
    ok = all(0.1 <= p.agreement <= 10 for p in points)
    detail = ", ".join(f"{p.ratio:g}: (1/n')/infidelity={p.agreement:.3f}" for p in points)
    report(7, "n' order of magnitude", ok, detail, elapsed, 120)


def _invariant_suite():
    failures = []
    for seed in SEEDS:
        rng = np.random.default_rng(seed)
        # density-matrix invariants of partial traces
        psi = StateVector((2, 5), random_ket(rng, 10))
        for keep in (0, 1):
            red = partial_trace(psi, keep)
            DensityMatrix(red.dims, red.elements)
        s0, s1 = (von_neumann_entropy(partial_trace(psi, k)) for k in (0, 1))
        if abs(s0 - s1) > 1e-10:
            failures.append(f"entropy symmetry seed {seed}")
        # linearity
        r1, r2 = random_density(rng, 6), random_density(rng, 6)
        a = rng.uniform()
        mix = partial_trace(DensityMatrix((2, 3), a * r1 + (1 - a) * r2), 0).elements
        lin = a * partial_trace(DensityMatrix((2, 3), r1), 0).elements + (1 - a) * partial_trace(
            DensityMatrix((2, 3), r2), 0).elements
        if np.max(np.abs(mix - lin)) > 1e-12:
            failures.append(f"linearity seed {seed}")
        # unitarity over many steps
        h = random_hermitian(rng, 6)
        phi = StateVector((6,), random_ket(rng, 6))
        for _ in range(1000):
            phi = evolve(h, phi, 0.01)
        if abs(np.linalg.norm(phi.amplitudes) - 1) > 1e-10:
            failures.append(f"unitarity seed {seed}")
        # JC excitation conservation
        cfg = JCConfig(g=1.0, alpha=CoherentAmplitude.from_mean_photons(rng.uniform(1, 16)),
                       atom_init=random_ket(rng, 2))
        res = jc_evolve(cfg, np.linspace(0, 20, 41))
        if np.max(np.abs(res.excitation - res.excitation[0])) > 1e-8:
            failures.append(f"JC conservation seed {seed}")
        # Bloch trajectory invariants
        for rho in bloch_evolve(random_density(rng, 2), PulseSpec(rng.uniform(0, 10), 2.0, rng.uniform(0, 2)),
                                np.linspace(0, 2, 5)):
            if abs(np.trace(rho.elements) - 1) > 1e-10:
                failures.append(f"bloch trace seed {seed}")
    # determinism
    a = render(scan_mean_photon(math.pi / 2, [25, 50, 100, 200]).records)
    b = render(scan_mean_photon(math.pi / 2, [25, 50, 100, 200]).records)
    if a != b:
        failures.append("determinism")
    return failures


def test_8_invariant_suite():
    t0 = time.perf_counter()
    failures = _invariant_suite()
    elapsed = time.perf_counter() - t0
    report(8, "invariant suite", not failures, f"{len(SEEDS)} seeds, failures: {failures or 'none'}", elapsed, 30)


def test_9_collapse_revival():
    t0 = time.perf_counter()
    cfg = JCConfig(g=1.0, alpha=CoherentAmplitude.from_mean_photons(25))
    predicted = 2 * math.pi * math.sqrt(25)
    times = np.linspace(0, 1.6 * predicted, 8001)
    res = jc_evolve(cfg, times)
    t_rev = revival_time(times, res.inversion, predicted, cfg.mean_rabi)
    elapsed = time.perf_counter() - t0
    err = t_rev / predicted - 1
    report(9, "collapse/revival", abs(err) <= 0.05, f"peak at t={t_rev:.3f} vs {predicted:.3f} ({err:+.2%})", elapsed, 5)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
