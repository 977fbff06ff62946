"""Strang split-step propagator for the coupled condensate/impurity system.

Dimensionless equations of motion (harmonic-oscillator units of the
condensate species):

    i dpsi_B/dt = [-1/2 d^2/dz^2 + z^2/2 + G_B |psi_B|^2 + G_IB |psi_I|^2] psi_B
    i dpsi_I/dt = [-a^2/2 d^2/dz^2 + z^2/(2 a^2) + G_BI |psi_B|^2] psi_I

with a the impurity/condensate oscillator-length ratio.  Both wave
functions are kept normalized to one; atom numbers live inside the
effective couplings.  A single step is second-order Strang splitting:
half potential kick, full spectral kinetic step, half potential kick
with updated densities.  The potential kicks only rotate phases in real
time, so using instantaneous densities is exact for the coupling terms.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .grid import (
    ComplexField,
    Grid1D,
    norm2,
    normalize,
    project_odd,
    spectral_derivative,
    spectral_kinetic_phase,
)

DEFAULT_DT_IMAGINARY = 1e-4
DEFAULT_DT_REAL = 2e-4


class BlowUpError(RuntimeError):
    """Non-finite field values; the usual cause is a too-large time step."""

    def __init__(self, time: float, partial=None):
        super().__init__(
            f"non-finite field values at t = {time:.6g} "
            "(time step too large for the current couplings?)"
        )
        self.time = time
        self.partial = partial


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless couplings and trap switches.

    g_IB is the per-pair interspecies coupling; effective couplings
    resolve as G_IB = N_I * g_IB (impurity acting on the condensate) and
    G_BI = N_B * g_IB (condensate acting on the impurity) unless an
    override pins them directly.
    """

    G_B: float = 4.71
    g_IB: float = 0.0
    N_B: int = 200
    N_I: int = 1
    alpha: float = 0.808
    trap_B_on: bool = True
    trap_I_on: bool = True
    G_IB_override: Optional[float] = None
    G_BI_override: Optional[float] = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.N_B < 1 or self.N_I < 1:
            raise ValueError("atom numbers must be >= 1")

    @property
    def G_IB(self) -> float:
        if self.G_IB_override is not None:
            return self.G_IB_override
        return self.N_I * self.g_IB

    @property
    def G_BI(self) -> float:
        if self.G_BI_override is not None:
            return self.G_BI_override
        return self.N_B * self.g_IB

    def with_g_IB(self, value: float) -> "ModelParams":
        """New params with the interspecies coupling set to `value`.

        A run configured with explicit overrides is treated as using the
        direct convention (figure-label couplings), so the overrides
        follow the new value too.
        """
        direct = self.G_IB_override is not None or self.G_BI_override is not None
        return replace(
            self,
            g_IB=value,
            G_IB_override=value if direct else None,
            G_BI_override=value if direct else None,
        )


@dataclass
class SystemState:
    """Both wave functions at one instant of dimensionless time."""

    psi_B: ComplexField
    psi_I: ComplexField
    time: float = 0.0

    def __post_init__(self):
        if self.psi_B.grid is not self.psi_I.grid and not self.psi_B.grid.compatible_with(
            self.psi_I.grid
        ):
            raise ValueError("psi_B and psi_I live on different grids")

    @property
    def grid(self) -> Grid1D:
        return self.psi_B.grid


@dataclass(frozen=True)
class Segment:
    """One piecewise-constant stretch of a quench schedule.

    g_IB_value of None keeps the base coupling unchanged.
    """

    t_start: float
    t_end: float
    trap_B_on: bool = True
    trap_I_on: bool = True
    g_IB_value: Optional[float] = None


@dataclass
class QuenchSchedule:
    """Contiguous, non-overlapping segments starting at t = 0."""

    segments: Sequence[Segment]

    def __post_init__(self):
        segs = list(self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        if abs(segs[0].t_start) > 1e-12:
            raise ValueError("first segment must start at t = 0")
        for a, b in zip(segs, segs[1:]):
            if abs(a.t_end - b.t_start) > 1e-12:
                raise ValueError(
                    f"schedule gap/overlap between t = {a.t_end} and t = {b.t_start}"
                )
        for s in segs:
            if not s.t_end > s.t_start:
                raise ValueError(f"empty segment at t = {s.t_start}")
        self.segments = tuple(segs)

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def params_for(self, base: ModelParams, segment: Segment) -> ModelParams:
        p = replace(
            base, trap_B_on=segment.trap_B_on, trap_I_on=segment.trap_I_on
        )
        if segment.g_IB_value is not None:
            p = p.with_g_IB(segment.g_IB_value)
        return p

    @classmethod
    def constant(cls, t_end: float, trap_B_on=True, trap_I_on=True, g_IB_value=None):
        return cls([Segment(0.0, t_end, trap_B_on, trap_I_on, g_IB_value)])

    @classmethod
    def tof(cls, t_end: float) -> "QuenchSchedule":
        """Traps off from t = 0, interactions untouched."""
        return cls.constant(t_end, trap_B_on=False, trap_I_on=False)

    @classmethod
    def interaction_off(cls, t_end: float) -> "QuenchSchedule":
        """Interspecies coupling off from t = 0, traps kept on."""
        return cls.constant(t_end, g_IB_value=0.0)


def potential_B(state: SystemState, params: ModelParams) -> np.ndarray:
    """Pointwise potential felt by the condensate."""
    grid = state.grid
    v = params.G_B * state.psi_B.density() + params.G_IB * state.psi_I.density()
    if params.trap_B_on:
        v = v + 0.5 * grid.z**2
    return v


def potential_I(state: SystemState, params: ModelParams) -> np.ndarray:
    """Pointwise potential felt by the impurity."""
    grid = state.grid
    v = params.G_BI * state.psi_B.density()
    if params.trap_I_on:
        v = v + grid.z**2 / (2.0 * params.alpha**2)
    return v


def step(
    state: SystemState,
    params: ModelParams,
    dt: float,
    imaginary: bool = False,
    zeno: bool = False,
) -> SystemState:
    """One Strang step of size dt for both species simultaneously.

    Real time: exactly norm-conserving.  Imaginary time (gradient flow):
    both fields are renormalized after the step.  With zeno on, the
    impurity is projected onto the odd-parity subspace after the step,
    mimicking a frequent parity measurement.
    """
    if dt == 0.0:
        raise ValueError("dt must be nonzero")
    tau = -1j * dt if imaginary else dt

    psi_B, psi_I = state.psi_B, state.psi_I
    v_B = potential_B(state, params)
    v_I = potential_I(state, params)
    psi_B = ComplexField(psi_B.grid, np.exp(-0.5j * tau * v_B) * psi_B.values)
    psi_I = ComplexField(psi_I.grid, np.exp(-0.5j * tau * v_I) * psi_I.values)

    psi_B = spectral_kinetic_phase(psi_B, 1.0, tau)
    psi_I = spectral_kinetic_phase(psi_I, params.alpha**2, tau)

    mid = SystemState(psi_B, psi_I, state.time)
    v_B = potential_B(mid, params)
    v_I = potential_I(mid, params)
    psi_B = ComplexField(psi_B.grid, np.exp(-0.5j * tau * v_B) * psi_B.values)
    psi_I = ComplexField(psi_I.grid, np.exp(-0.5j * tau * v_I) * psi_I.values)

    if zeno:
        psi_I = project_odd(psi_I)
    if imaginary:
        try:
            psi_B = normalize(psi_B)
            psi_I = normalize(psi_I)
        except ValueError as exc:
            raise BlowUpError(state.time + dt) from exc

    if not (
        np.all(np.isfinite(psi_B.values.view(np.float64)))
        and np.all(np.isfinite(psi_I.values.view(np.float64)))
    ):
        raise BlowUpError(state.time + dt)

    return SystemState(psi_B, psi_I, state.time + dt)


@dataclass
class SnapshotSeries:
    """Time-sampled wave functions of an evolve() run."""

    grid: Grid1D
    times: np.ndarray
    psi_B: np.ndarray  # (n_snapshots, n_points) complex
    psi_I: np.ndarray
    params: ModelParams
    dt: float = 0.0
    snapshot_stride: int = 1

    def __len__(self) -> int:
        return len(self.times)

    @property
    def density_B(self) -> np.ndarray:
        return np.abs(self.psi_B) ** 2

    @property
    def density_I(self) -> np.ndarray:
        return np.abs(self.psi_I) ** 2

    def state(self, i: int) -> SystemState:
        return SystemState(
            ComplexField(self.grid, self.psi_B[i].copy()),
            ComplexField(self.grid, self.psi_I[i].copy()),
            float(self.times[i]),
        )


class _SnapshotCollector:
    def __init__(self, grid, params, dt, stride):
        self.grid = grid
        self.params = params
        self.dt = dt
        self.stride = stride
        self.times = []
        self.rows_B = []
        self.rows_I = []

    def record(self, state: SystemState):
        self.times.append(state.time)
        self.rows_B.append(state.psi_B.values.copy())
        self.rows_I.append(state.psi_I.values.copy())

    def series(self) -> SnapshotSeries:
        return SnapshotSeries(
            self.grid,
            np.asarray(self.times),
            np.asarray(self.rows_B),
            np.asarray(self.rows_I),
            self.params,
            self.dt,
            self.stride,
        )


def evolve(
    state: SystemState,
    params: ModelParams,
    schedule: QuenchSchedule,
    t_final: float,
    dt: float = DEFAULT_DT_REAL,
    snapshot_stride: int = 100,
    zeno: bool = False,
) -> SnapshotSeries:
    """Real-time propagation under a piecewise-constant schedule.

    Snapshots are taken at t = 0, then every snapshot_stride steps, and
    at t_final.  Segment boundaries are hit exactly: the last step of a
    segment is shortened as needed (and still counts as a step).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if schedule.t_end < t_final - 1e-12:
        raise ValueError(
            f"schedule ends at t = {schedule.t_end} but t_final = {t_final}"
        )

    collector = _SnapshotCollector(state.grid, params, dt, snapshot_stride)
    collector.record(state)
    n_steps = 0
    try:
        for segment in schedule.segments:
            if segment.t_start >= t_final - 1e-12:
                break
            seg_params = schedule.params_for(params, segment)
            seg_end = min(segment.t_end, t_final)
            span = seg_end - segment.t_start
            n_full = int(math.floor(span / dt + 1e-9))
            remainder = span - n_full * dt
            for i in range(n_full):
                state = step(state, seg_params, dt, zeno=zeno)
                state.time = segment.t_start + (i + 1) * dt
                n_steps += 1
                if n_steps % snapshot_stride == 0:
                    collector.record(state)
            if remainder > 1e-12:
                state = step(state, seg_params, remainder, zeno=zeno)
                n_steps += 1
                if n_steps % snapshot_stride == 0:
                    collector.record(state)
            state.time = seg_end
    except BlowUpError as exc:
        exc.partial = collector.series()
        raise

    if collector.times[-1] < state.time - 1e-12:
        collector.record(state)
    return collector.series()


def energy_components(state: SystemState, params: ModelParams) -> dict:
    """Energy integrals per term; kinetic parts evaluated spectrally."""
    grid = state.grid
    dz = grid.dz
    n_B = state.psi_B.density()
    n_I = state.psi_I.density()
    dpsi_B = spectral_derivative(state.psi_B)
    dpsi_I = spectral_derivative(state.psi_I)
    trap_B = 0.5 * grid.z**2 if params.trap_B_on else 0.0
    trap_I = grid.z**2 / (2 * params.alpha**2) if params.trap_I_on else 0.0
    return {
        "kinetic_B": float(np.sum(np.abs(dpsi_B) ** 2) * dz / 2.0),
        "trap_B": float(np.sum(trap_B * n_B) * dz),
        "self_B": float(0.5 * params.G_B * np.sum(n_B**2) * dz),
        "cross_B": float(params.G_IB * np.sum(n_I * n_B) * dz),
        "kinetic_I": float(params.alpha**2 * np.sum(np.abs(dpsi_I) ** 2) * dz / 2.0),
        "trap_I": float(np.sum(trap_I * n_I) * dz),
        "cross_I": float(params.G_BI * np.sum(n_B * n_I) * dz),
    }


def energy(state: SystemState, params: ModelParams) -> tuple:
    """(E_B, E_I): per-species energy functionals.

    E_B is the condensate Gross-Pitaevskii functional including the full
    impurity mean-field term; E_I is the impurity expectation value of
    its single-particle Hamiltonian plus the condensate mean field.
    """
    c = energy_components(state, params)
    e_b = c["kinetic_B"] + c["trap_B"] + c["self_B"] + c["cross_B"]
    e_i = c["kinetic_I"] + c["trap_I"] + c["cross_I"]
    return e_b, e_i
