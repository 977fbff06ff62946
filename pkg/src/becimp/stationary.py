"""Imaginary-time relaxation to the coupled equilibrium.

The condensate relaxes to its ground state while the impurity, held in
the odd-parity subspace by the per-step projection (the measurement
idealization), relaxes to the lowest odd state.  Also houses the
durability experiment for the unprojected excited impurity and the
equilibrium imprint classifier.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import (
    ComplexField,
    Grid1D,
    moment,
    norm2,
    normalize,
    project_odd,
    spectral_kinetic_phase,
)
from .solver import ModelParams, SystemState, energy, step

DEFAULT_DTAU = 1e-4
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 5_000_000


def trial_impurity(grid: Grid1D, width: float) -> ComplexField:
    """Odd trial wave packet sqrt(2/(sqrt(pi) A^3)) z exp(-z^2 / 2A^2)."""
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    a = float(width)
    amp = math.sqrt(2.0 / (math.sqrt(math.pi) * a**3))
    values = amp * grid.z * np.exp(-(grid.z**2) / (2.0 * a**2))
    return normalize(project_odd(ComplexField(grid, values)))


def gaussian_ground(grid: Grid1D, width: float = 1.0) -> ComplexField:
    """Normalized Gaussian exp(-z^2 / 2 w^2), the w = 1 oscillator ground state."""
    values = np.exp(-(grid.z**2) / (2.0 * width**2)).astype(np.complex128)
    return normalize(ComplexField(grid, values))


def thomas_fermi_seed(grid: Grid1D, G_B: float) -> ComplexField:
    """sqrt of the inverted-parabola density; faster seed at large G_B."""
    from .analytics import thomas_fermi_profile

    _, density = thomas_fermi_profile(G_B)
    return normalize(ComplexField(grid, np.sqrt(density(grid.z))))


@dataclass
class RelaxationReport:
    """Outcome of relax_coupled."""

    final_state: SystemState
    energy_trace: np.ndarray  # rows of (tau, E_B, E_I)
    iterations: int
    converged: bool


def relax_coupled(
    params: ModelParams,
    grid: Grid1D,
    dtau: float = DEFAULT_DTAU,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    trace_stride: int = 50,
    bec_seed: str = "auto",
    impurity_width: Optional[float] = None,
    min_tau: float = 1.0,
    initial_state: Optional[SystemState] = None,
) -> RelaxationReport:
    """Relax both species simultaneously with the parity projection on.

    Converged when the relative energy change per unit imaginary time of
    both species drops below tol between successive trace points.
    bec_seed: "auto" (Gaussian for G_B <= 10, Thomas-Fermi above),
    "gaussian", or "thomas-fermi".  initial_state overrides the seeds
    (warm starts for parameter scans).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if initial_state is not None:
        state = SystemState(initial_state.psi_B.copy(), initial_state.psi_I.copy(), 0.0)
    else:
        if bec_seed == "auto":
            bec_seed = "gaussian" if params.G_B <= 10 else "thomas-fermi"
        if bec_seed == "gaussian":
            psi_B = gaussian_ground(grid)
        elif bec_seed == "thomas-fermi":
            psi_B = thomas_fermi_seed(grid, params.G_B)
        else:
            raise ValueError(f"unknown bec_seed {bec_seed!r}")
        width = params.alpha if impurity_width is None else impurity_width
        state = SystemState(psi_B, trial_impurity(grid, width), 0.0)

    trace = [(0.0, *energy(state, params))]
    converged = False
    iterations = 0
    dtau_trace = dtau * trace_stride
    while iterations < max_iters:
        state = step(state, params, dtau, imaginary=True, zeno=True)
        iterations += 1
        if iterations % trace_stride == 0:
            tau = iterations * dtau
            e_b, e_i = energy(state, params)
            prev = trace[-1]
            trace.append((tau, e_b, e_i))
            rate_b = abs(e_b - prev[1]) / (max(abs(e_b), 1e-9) * dtau_trace)
            rate_i = abs(e_i - prev[2]) / (max(abs(e_i), 1e-9) * dtau_trace)
            if tau >= min_tau and rate_b < tol and rate_i < tol:
                converged = True
                break

    state.time = 0.0
    return RelaxationReport(
        final_state=state,
        energy_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
    )


def zeno_durability_experiment(
    grid: Grid1D,
    dtau: float = 1e-3,
    tau_max: float = 100.0,
    alpha: float = 0.808,
    zeno: bool = False,
    seed_even_amplitude: float = 0.0,
    trace_stride: int = 100,
):
    """Impurity-only imaginary-time energy trace (no condensate background).

    Without the projection the excited odd state survives only until the
    even ground-state component, seeded by round-off (or explicitly via
    seed_even_amplitude), outgrows it; the energy then falls from the
    excited to the ground level.  With zeno on the projection removes
    the contaminant every step and the plateau persists.

    Returns an (n, 2) array of (tau, E_I) rows.
    """
    from .observables import ObservableSeries

    psi = trial_impurity(grid, alpha)
    if seed_even_amplitude:
        contaminant = gaussian_ground(grid, alpha)
        psi = normalize(
            ComplexField(
                grid, psi.values + seed_even_amplitude * contaminant.values
            )
        )

    v = grid.z**2 / (2.0 * alpha**2)
    half_kick = np.exp(-0.5 * dtau * v)
    mass = alpha**2

    def impurity_energy(f: ComplexField) -> float:
        from .grid import spectral_derivative

        kin = mass * np.sum(np.abs(spectral_derivative(f)) ** 2) * grid.dz / 2.0
        pot = np.sum(v * f.density()) * grid.dz
        return float(kin + pot)

    n_steps = int(round(tau_max / dtau))
    times = [0.0]
    energies = [impurity_energy(psi)]
    for i in range(1, n_steps + 1):
        vals = half_kick * psi.values
        psi = spectral_kinetic_phase(ComplexField(grid, vals), mass, -1j * dtau)
        psi = ComplexField(grid, half_kick * psi.values)
        if zeno:
            psi = project_odd(psi)
        psi = normalize(psi)
        if i % trace_stride == 0 or i == n_steps:
            times.append(i * dtau)
            energies.append(impurity_energy(psi))

    return ObservableSeries(
        times=np.asarray(times), values=np.asarray(energies), label="E_I"
    )


@dataclass(frozen=True)
class ImprintDescriptor:
    """Morphology of the impurity's imprint on the condensate density."""

    n_bumps: int
    n_dips: int
    fragmented: bool


def classify_imprint(
    state_with: RelaxationReport,
    state_without: RelaxationReport,
    fragmentation_threshold: float = 1e-3,
    extremum_rel_threshold: float = 0.1,
    extremum_abs_floor: float = 1e-8,
    cloud_rel_floor: float = 0.02,
) -> ImprintDescriptor:
    """Count bumps/dips of the depleted density inside the cloud.

    Bumps (dips) are local maxima (minima) of n_with - n_without whose
    magnitude exceeds extremum_rel_threshold of the largest deviation,
    restricted to where the reference cloud holds appreciable density.
    fragmented is true when the coupled density has >= 2 distinct
    interior near-zero zones (below fragmentation_threshold of peak).
    """
    if not (state_with.converged and state_without.converged):
        raise ValueError("classify_imprint requires converged relaxations")
    n_with = state_with.final_state.psi_B.density()
    n_without = state_without.final_state.psi_B.density()
    if n_with.shape != n_without.shape:
        raise ValueError("relaxations live on different grids")

    diff = n_with - n_without
    cloud = n_without > cloud_rel_floor * n_without.max()
    scale = np.max(np.abs(diff[cloud])) if cloud.any() else 0.0
    threshold = max(extremum_rel_threshold * scale, extremum_abs_floor)

    interior = diff[1:-1]
    is_max = (interior > diff[:-2]) & (interior > diff[2:])
    is_min = (interior < diff[:-2]) & (interior < diff[2:])
    in_cloud = cloud[1:-1]
    n_bumps = int(np.sum(is_max & in_cloud & (interior > threshold)))
    n_dips = int(np.sum(is_min & in_cloud & (interior < -threshold)))

    # fragmentation: count contiguous near-zero zones strictly inside the
    # coupled cloud's support
    peak = n_with.max()
    support = np.flatnonzero(n_with > cloud_rel_floor * peak)
    fragmented = False
    if support.size > 2:
        inner = slice(support[0], support[-1] + 1)
        near_zero = n_with[inner] < fragmentation_threshold * peak
        n_zones = int(np.sum(near_zero[1:] & ~near_zero[:-1])) + int(near_zero[0])
        fragmented = n_zones >= 2
    return ImprintDescriptor(n_bumps=n_bumps, n_dips=n_dips, fragmented=fragmented)
