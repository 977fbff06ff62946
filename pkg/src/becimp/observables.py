"""Derived quantities: widths, frequencies, soliton tracks, fringe
counts, the effective mass, and the variational width dynamics."""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.ndimage import median_filter

from .grid import ComplexField, moment
from .solver import SnapshotSeries


@dataclass
class ObservableSeries:
    """A scalar observable sampled on strictly increasing times."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.times.shape[0] != self.values.shape[0]:
            raise ValueError("times and values must have equal length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)


def depleted_density(n_with: np.ndarray, n_without: np.ndarray) -> np.ndarray:
    """Pointwise density difference between coupled and reference runs."""
    n_with = np.asarray(n_with)
    n_without = np.asarray(n_without)
    if n_with.shape != n_without.shape:
        raise ValueError(
            f"grid mismatch: shapes {n_with.shape} vs {n_without.shape}"
        )
    return n_with - n_without


def effective_mass_ratio(psi_I: ComplexField, alpha: float) -> float:
    """m_eff/m_I inferred from the impurity spread: alpha^2 / (2 sigma^2)."""
    mean = moment(psi_I, 1)
    sigma2 = moment(psi_I, 2) - mean**2
    if sigma2 <= 0 or not np.isfinite(sigma2):
        raise ValueError(f"degenerate impurity spread sigma^2 = {sigma2}")
    return alpha**2 / (2.0 * sigma2)


def width_series(snapshots: SnapshotSeries, species: str) -> ObservableSeries:
    """RMS width sqrt(<z^2>) of one species over a snapshot series."""
    if len(snapshots) == 0:
        raise ValueError("empty snapshot series")
    if species in ("B", "bec"):
        density = snapshots.density_B
    elif species in ("I", "impurity"):
        density = snapshots.density_I
    else:
        raise ValueError(f"unknown species {species!r}")
    z2 = snapshots.grid.z**2
    widths = np.sqrt(density @ z2 * snapshots.grid.dz)
    return ObservableSeries(snapshots.times, widths, label=f"width_{species}")


def dominant_frequency(series: ObservableSeries, min_periods: float = 2.0) -> float:
    """Angular frequency of the strongest spectral line of the series.

    Peak of the Hann-windowed discrete spectrum of the mean-subtracted
    values, refined by quadratic interpolation around the peak bin.
    Relative resolution is ~1% once >= 4 oscillation periods are
    sampled; below min_periods the series is rejected as too short.
    """
    values = np.asarray(series.values, dtype=float)
    if len(values) < 8:
        raise ValueError("series too short")
    detrended = values - values.mean()
    scale = np.max(np.abs(detrended))
    if scale == 0 or scale < 1e-12 * max(1.0, abs(values.mean())):
        raise ValueError("no oscillation in series (constant values)")

    dt = float(series.times[1] - series.times[0])
    n = len(values)
    spectrum = np.abs(np.fft.rfft(detrended * np.hanning(n)))
    spectrum[0] = 0.0
    peak = int(np.argmax(spectrum))
    if peak == 0 or peak >= len(spectrum) - 1:
        raise ValueError("series too short to resolve a spectral peak")
    # quadratic interpolation on log magnitude
    a, b, c = np.log(spectrum[peak - 1 : peak + 2] + 1e-300)
    denom = a - 2 * b + c
    delta = 0.5 * (a - c) / denom if denom != 0 else 0.0
    freq = 2.0 * np.pi * (peak + delta) / (n * dt)

    total_time = series.times[-1] - series.times[0]
    if freq * total_time < min_periods * 2.0 * np.pi:
        raise ValueError(
            f"series too short: {freq * total_time / (2 * np.pi):.2f} periods "
            f"sampled, need >= {min_periods}"
        )
    return float(freq)


@dataclass
class _Track:
    times: List[float] = field(default_factory=list)
    positions: List[float] = field(default_factory=list)
    velocity: float = 0.0
    missed: int = 0
    lost: bool = False

    def predict(self, t: float) -> float:
        if not self.times:
            return 0.0
        return self.positions[-1] + self.velocity * (t - self.times[-1])

    def add(self, t: float, z: float):
        if self.times:
            dt = t - self.times[-1]
            if dt > 0:
                self.velocity = (z - self.positions[-1]) / dt
        self.times.append(t)
        self.positions.append(z)
        self.missed = 0


def _refine_minimum(z: np.ndarray, n: np.ndarray, j: int) -> float:
    """Parabolic sub-grid refinement of a local extremum position."""
    y0, y1, y2 = n[j - 1], n[j], n[j + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(z[j])
    delta = 0.5 * (y0 - y2) / denom
    return float(z[j] + delta * (z[1] - z[0]))


def _cloud_radius(z: np.ndarray, density: np.ndarray, rel_floor: float = 0.01) -> float:
    idx = np.flatnonzero(density > rel_floor * density.max())
    if idx.size == 0:
        return 0.0
    return float(max(abs(z[idx[0]]), abs(z[idx[-1]])))


def track_minima(
    snapshots: SnapshotSeries,
    window_fraction: float = 0.9,
    depth_threshold: float = 0.8,
    envelope_halfwidth: float = 0.5,
    gate: float = 0.5,
    max_missed: int = 3,
) -> List[ObservableSeries]:
    """Track gray-soliton density minima through a snapshot series.

    Per frame, minima of the condensate density inside
    |z| < window_fraction * (instantaneous cloud radius) that dip below
    depth_threshold times the local smooth envelope (moving-window
    median of half-width envelope_halfwidth) are associated to existing
    tracks by nearest-neighbor continuation of the velocity-extrapolated
    positions; a track missing for more than max_missed frames is
    terminated and flagged (label suffix ":lost").
    """
    grid = snapshots.grid
    z = grid.z
    size = max(3, 2 * int(round(envelope_halfwidth / grid.dz)) + 1)
    tracks: List[_Track] = []

    for i, t in enumerate(snapshots.times):
        n = snapshots.density_B[i]
        envelope = median_filter(n, size=size, mode="nearest")
        radius = window_fraction * _cloud_radius(z, n)
        interior = np.abs(z) < radius
        candidates = []
        for j in range(1, len(n) - 1):
            if not interior[j]:
                continue
            if n[j] < n[j - 1] and n[j] < n[j + 1] and n[j] <= depth_threshold * envelope[j]:
                candidates.append(_refine_minimum(z, n, j))

        live = [tr for tr in tracks if not tr.lost]
        taken = [False] * len(candidates)
        # greedy nearest assignment, best matches first
        pairs = sorted(
            (
                (abs(tr.predict(t) - c), ti, ci)
                for ti, tr in enumerate(live)
                for ci, c in enumerate(candidates)
            ),
        )
        matched_tracks = set()
        for dist, ti, ci in pairs:
            if dist > gate or ti in matched_tracks or taken[ci]:
                continue
            live[ti].add(t, candidates[ci])
            matched_tracks.add(ti)
            taken[ci] = True
        for ti, tr in enumerate(live):
            if ti not in matched_tracks:
                tr.missed += 1
                if tr.missed > max_missed:
                    tr.lost = True
        for ci, c in enumerate(candidates):
            if not taken[ci]:
                fresh = _Track()
                fresh.add(t, c)
                tracks.append(fresh)

    out = []
    for i, tr in enumerate(tracks):
        label = f"soliton_{i}" + (":lost" if tr.lost else "")
        out.append(
            ObservableSeries(np.asarray(tr.times), np.asarray(tr.positions), label)
        )
    return out


def persistent_tracks(
    tracks: List[ObservableSeries], times: np.ndarray, min_span_fraction: float = 0.5
) -> List[ObservableSeries]:
    """Tracks spanning at least min_span_fraction of the observed window."""
    total = times[-1] - times[0]
    return [
        tr
        for tr in tracks
        if len(tr) > 1 and (tr.times[-1] - tr.times[0]) >= min_span_fraction * total
    ]


def count_fringes(density: np.ndarray, rel_threshold: float = 0.01) -> int:
    """Number of local density maxima above rel_threshold of the peak."""
    n = np.asarray(density)
    if n.size < 3 or n.max() <= 0:
        return 0
    floor = rel_threshold * n.max()
    interior = n[1:-1]
    peaks = (interior > n[:-2]) & (interior > n[2:]) & (interior > floor)
    return int(np.sum(peaks))


@dataclass
class VariationalWidth:
    """Breathing-width dynamics from the closed form and the ODE."""

    A0: float
    alpha: float
    trace: ObservableSeries       # closed form
    ode_trace: ObservableSeries   # 4th-order integration of the width ODE
    max_discrepancy: float


def closed_form_width(A0: float, alpha: float, t) -> np.ndarray:
    """A(t) = sqrt([a^4 + (A0^4 - a^4) cos(2t) + A0^4] / (2 A0^2))."""
    t = np.asarray(t, dtype=float)
    a4 = alpha**4
    return np.sqrt((a4 + (A0**4 - a4) * np.cos(2.0 * t) + A0**4) / (2.0 * A0**2))


def _width_rhs(y: np.ndarray, alpha4: float) -> np.ndarray:
    a, v = y
    return np.array([v, alpha4 / a**3 - a])


def integrate_width_ode(
    A0: float, alpha: float, t_grid: np.ndarray, max_step: float = 1e-3
) -> np.ndarray:
    """Fixed-step RK4 for A'' = alpha^4/A^3 - A, sampled on t_grid."""
    alpha4 = alpha**4
    y = np.array([A0, 0.0])
    out = np.empty_like(t_grid, dtype=float)
    t = float(t_grid[0])
    if t != 0.0:
        raise ValueError("t_grid must start at 0")
    out[0] = A0
    for i in range(1, len(t_grid)):
        span = float(t_grid[i]) - t
        n_sub = max(1, int(math.ceil(span / max_step - 1e-12)))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = _width_rhs(y, alpha4)
            k2 = _width_rhs(y + 0.5 * h * k1, alpha4)
            k3 = _width_rhs(y + 0.5 * h * k2, alpha4)
            k4 = _width_rhs(y + h * k3, alpha4)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = float(t_grid[i])
        out[i] = y[0]
    return out


def variational_width(A0: float, alpha: float, t_grid) -> VariationalWidth:
    """Width trace from the closed form and, independently, the ODE.

    The two must agree; max_discrepancy reports how well they do.
    """
    if not A0 > 0:
        raise ValueError("A0 must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    closed = closed_form_width(A0, alpha, t_grid)
    ode = integrate_width_ode(A0, alpha, t_grid)
    return VariationalWidth(
        A0=A0,
        alpha=alpha,
        trace=ObservableSeries(t_grid, closed, "width_closed_form"),
        ode_trace=ObservableSeries(t_grid, ode, "width_ode"),
        max_discrepancy=float(np.max(np.abs(closed - ode))),
    )


@dataclass
class ShockSignature:
    """Steep-gradient detector output plus disturbance-front tracks."""

    tripped: bool
    trip_time: Optional[float]
    max_gradient_ratio: float
    left_positions: ObservableSeries
    right_positions: ObservableSeries


def shock_signature(
    snapshots: SnapshotSeries,
    equilibrium_density: np.ndarray,
    gradient_factor: float = 5.0,
    trip_window: float = 0.1,
    margin: float = 0.1,
) -> ShockSignature:
    """Classify a post-quench run as shock-generating.

    Trips when max |dn/dz| exceeds gradient_factor times the equilibrium
    maximum within trip_window of the quench.  Also tracks, per frame,
    the position of the strongest density deviation on each side of the
    origin (the counter-propagating disturbance fronts).
    """
    grid = snapshots.grid
    z = grid.z
    eq_grad = np.max(np.abs(np.gradient(equilibrium_density, grid.dz)))
    tripped = False
    trip_time = None
    max_ratio = 0.0
    lefts, rights = [], []
    for i, t in enumerate(snapshots.times):
        n = snapshots.density_B[i]
        ratio = np.max(np.abs(np.gradient(n, grid.dz))) / eq_grad
        if t <= trip_window:
            max_ratio = max(max_ratio, ratio)
            if not tripped and ratio > gradient_factor:
                tripped = True
                trip_time = float(t)
        deviation = np.abs(n - equilibrium_density)
        left = z < -margin
        right = z > margin
        lefts.append(z[left][np.argmax(deviation[left])])
        rights.append(z[right][np.argmax(deviation[right])])
    return ShockSignature(
        tripped=tripped,
        trip_time=trip_time,
        max_gradient_ratio=float(max_ratio),
        left_positions=ObservableSeries(snapshots.times, np.asarray(lefts), "front_left"),
        right_positions=ObservableSeries(snapshots.times, np.asarray(rights), "front_right"),
    )
