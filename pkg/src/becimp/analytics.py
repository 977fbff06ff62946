"""Dimensional layer: experimental inputs -> dimensionless couplings,
plus the closed-form mean-field validity estimates.

Every function here is pure arithmetic on pinned constants, so results
are bit-reproducible.  Several of the quoted reference numbers are not
reproduced by the printed formulas under the stated inputs; the
comparison report surfaces both values side by side instead of silently
matching either (mismatch flag at 20% relative difference).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# Pinned constants (SI).
# hbar is deliberately the 3-significant-figure value: the reference
# experimental parameter set (oscillator length 28742.3 a0 for 87 u at
# 2*pi*50 Hz) is only consistent with this truncation; CODATA hbar
# (1.054571817e-34) shifts l_z by +0.22%.
HBAR = 1.05e-34
K_B = 1.380649e-23
BOHR_RADIUS = 5.29177210903e-11
ATOMIC_MASS = 1.66053906660e-27
ZETA_3 = 1.2020569

# Reference values quoted for the Rb-Cs parameter set, used only for the
# side-by-side comparison report.
QUOTED = {
    "l_z_a0": 28742.3,
    "G_B": 4.71,
    "g_IB": 0.16,
    "alpha": 0.808,
    "healing_G10": 0.0020,
    "healing_G100": 0.0014,
    "quantum_depletion": 0.0022,
    "gamma": 0.046,
    "T_c_nK": 14.7,
    "T_at_0.001_nK": 2.15,
}
MISMATCH_RELATIVE = 0.20


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional experimental inputs.

    Scattering lengths in Bohr radii, frequencies angular (rad/s),
    masses in atomic mass units.
    """

    N_B: int = 200
    a_B: float = 94.7
    a_IB: float = 650.0
    omega_r: float = 2 * math.pi * 179.0
    omega_z: float = 2 * math.pi * 50.0
    omega_Ir: Optional[float] = None
    omega_Iz: Optional[float] = None
    m_B: float = 87.0
    m_I: float = 133.0

    def __post_init__(self):
        if self.omega_Ir is None:
            object.__setattr__(self, "omega_Ir", self.omega_r)
        if self.omega_Iz is None:
            object.__setattr__(self, "omega_Iz", self.omega_z)
        for name in ("N_B", "a_B", "omega_r", "omega_z", "omega_Ir", "omega_Iz", "m_B", "m_I"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.omega_z > self.omega_r / 3:
            warnings.warn(
                "omega_z is not << omega_r; the quasi-1D reduction is questionable",
                stacklevel=2,
            )


@dataclass
class DerivedScales:
    """Length scales and dimensionless couplings derived from PhysicalParams."""

    l_z: float          # m
    l_r: float          # m
    l_Iz: float         # m
    f_geometric: float
    G_B_dimless: float
    g_IB_dimless: float
    alpha: float
    T_c: float          # K
    gamma: float
    N_QF_fraction: float
    N_TF_fraction: Optional[float] = None
    healing_product: Optional[float] = None


def geometric_factor(phys: PhysicalParams) -> float:
    """Trap-geometry factor [1 + m_B/m_I] / [1 + (m_B w_r)/(m_I w_Ir)]."""
    ratio = phys.m_B / phys.m_I
    return (1.0 + ratio) / (1.0 + ratio * phys.omega_r / phys.omega_Ir)


def nondimensionalize(
    phys: PhysicalParams,
    n_1D_peak: Optional[float] = None,
    thermal_fraction: Optional[float] = None,
) -> DerivedScales:
    """All derived scales; optionally evaluates the density- and
    temperature-dependent validity numbers too."""
    m_B = phys.m_B * ATOMIC_MASS
    m_I = phys.m_I * ATOMIC_MASS
    l_z = math.sqrt(HBAR / (m_B * phys.omega_z))
    l_r = math.sqrt(HBAR / (m_B * phys.omega_r))
    l_Iz = math.sqrt(HBAR / (m_I * phys.omega_Iz))
    f = geometric_factor(phys)
    a_B = phys.a_B * BOHR_RADIUS
    a_IB = phys.a_IB * BOHR_RADIUS
    scales = DerivedScales(
        l_z=l_z,
        l_r=l_r,
        l_Iz=l_Iz,
        f_geometric=f,
        G_B_dimless=2.0 * phys.N_B * (phys.omega_r / phys.omega_z) * a_B / l_z,
        g_IB_dimless=2.0 * (phys.omega_r / phys.omega_z) * a_IB * f / l_z,
        alpha=l_Iz / l_z,
        T_c=critical_temperature(phys),
        gamma=thermal_prefactor(phys),
        N_QF_fraction=quantum_depletion_fraction(phys),
    )
    if n_1D_peak is not None:
        scales.healing_product = healing_check(phys, n_1D_peak)
    if thermal_fraction is not None:
        scales.N_TF_fraction = thermal_fraction
    return scales


def healing_check(phys: PhysicalParams, n_1D_peak: float) -> float:
    """|a_IB| / healing length, the mean-field validity product.

    The dimensionless peak density enters as n_1D a_B evaluated with
    lengths in units of l_z.
    """
    if not n_1D_peak > 0:
        raise ValueError("n_1D_peak must be positive")
    m_B = phys.m_B * ATOMIC_MASS
    l_z = math.sqrt(HBAR / (m_B * phys.omega_z))
    l_r = math.sqrt(HBAR / (m_B * phys.omega_r))
    a_B = phys.a_B * BOHR_RADIUS
    a_IB = abs(phys.a_IB) * BOHR_RADIUS
    return a_IB * math.sqrt(2.0 * n_1D_peak * a_B / l_z) / l_r


def thomas_fermi_profile(G: float) -> tuple:
    """(mu, density function) of the unit-normalized inverted parabola.

    mu = (3 G / (4 sqrt(2)))^(2/3); n(z) = (mu/G)(1 - z^2/R^2) clamped
    at zero outside R = sqrt(2 mu).
    """
    if not G > 0:
        raise ValueError("G must be positive")
    mu = (3.0 * G / (4.0 * math.sqrt(2.0))) ** (2.0 / 3.0)
    r2 = 2.0 * mu

    def density(z):
        z = np.asarray(z, dtype=float)
        return np.maximum(mu / G * (1.0 - z**2 / r2), 0.0)

    return mu, density


def quantum_depletion_fraction(phys: PhysicalParams) -> float:
    """Bogoliubov quantum-depletion fraction (1D reduction, TF profile)."""
    m_B = phys.m_B * ATOMIC_MASS
    l_z = math.sqrt(HBAR / (m_B * phys.omega_z))
    l_r = math.sqrt(HBAR / (m_B * phys.omega_r))
    a_B = phys.a_B * BOHR_RADIUS
    return (3.0 ** (1.0 / 3.0) / 4.0) * (
        a_B**4 * phys.N_B / (l_r**2 * l_z**2)
    ) ** (1.0 / 3.0)


def thermal_prefactor(phys: PhysicalParams) -> float:
    """Prefactor gamma of the thermal-depletion law N_T/N_B = gamma (T/T_c)^2."""
    m_B = phys.m_B * ATOMIC_MASS
    l_z = math.sqrt(HBAR / (m_B * phys.omega_z))
    l_r = math.sqrt(HBAR / (m_B * phys.omega_r))
    a_B = phys.a_B * BOHR_RADIUS
    prefactor = 5.0 ** (2.0 / 5.0) * math.pi**2 / (2.0 ** 1.5 * 3.0 ** 0.6)
    inner = (
        phys.N_B ** (1.0 / 3.0)
        / ZETA_3 ** (8.0 / 3.0)
        * a_B**2
        / (l_r ** (4.0 / 3.0) * l_z ** (2.0 / 3.0))
    )
    return prefactor * inner ** 0.2


def critical_temperature(phys: PhysicalParams) -> float:
    """T_c = (hbar/k_B) (w_r^2 w_z N_B / zeta(3))^(1/3), in kelvin."""
    return (HBAR / K_B) * (
        phys.omega_r**2 * phys.omega_z * phys.N_B / ZETA_3
    ) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ThermalDepletion:
    gamma: float
    T_c: float       # K
    fraction: float
    temperature: float  # K


def thermal_depletion(
    phys: PhysicalParams,
    T_over_Tc: Optional[float] = None,
    target_fraction: Optional[float] = None,
) -> ThermalDepletion:
    """Solve the thermal-depletion law in either direction.

    Give T_over_Tc to get the depleted fraction, or target_fraction to
    get the temperature that produces it.
    """
    if (T_over_Tc is None) == (target_fraction is None):
        raise ValueError("give exactly one of T_over_Tc or target_fraction")
    gamma = thermal_prefactor(phys)
    t_c = critical_temperature(phys)
    if T_over_Tc is not None:
        if T_over_Tc < 0:
            raise ValueError("T_over_Tc must be >= 0")
        fraction = gamma * T_over_Tc**2
        temperature = T_over_Tc * t_c
    else:
        if target_fraction < 0:
            raise ValueError("target_fraction must be >= 0")
        fraction = target_fraction
        temperature = t_c * math.sqrt(target_fraction / gamma)
    return ThermalDepletion(gamma=gamma, T_c=t_c, fraction=fraction, temperature=temperature)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    computed: float
    quoted: float
    mismatch: bool

    @property
    def relative_difference(self) -> float:
        return abs(self.computed - self.quoted) / abs(self.quoted)


def comparison_report(phys: PhysicalParams) -> list:
    """Formula-evaluated values next to the quoted reference numbers."""
    scales = nondimensionalize(phys)
    dep = thermal_depletion(phys, target_fraction=0.001)
    rows = [
        ("l_z_a0", scales.l_z / BOHR_RADIUS, QUOTED["l_z_a0"]),
        ("G_B", scales.G_B_dimless, QUOTED["G_B"]),
        ("g_IB", scales.g_IB_dimless, QUOTED["g_IB"]),
        ("alpha", scales.alpha, QUOTED["alpha"]),
        ("healing_G10", healing_check(phys, 0.355), QUOTED["healing_G10"]),
        ("healing_G100", healing_check(phys, 0.164), QUOTED["healing_G100"]),
        ("quantum_depletion", scales.N_QF_fraction, QUOTED["quantum_depletion"]),
        ("gamma", scales.gamma, QUOTED["gamma"]),
        ("T_c_nK", scales.T_c * 1e9, QUOTED["T_c_nK"]),
        ("T_at_0.001_nK", dep.temperature * 1e9, QUOTED["T_at_0.001_nK"]),
    ]
    return [
        ComparisonRow(
            name=name,
            computed=computed,
            quoted=quoted,
            mismatch=abs(computed - quoted) / abs(quoted) > MISMATCH_RELATIVE,
        )
        for name, computed, quoted in rows
    ]


def format_report(rows) -> str:
    lines = [f"{'quantity':<20}{'computed':>16}{'quoted':>12}  flag"]
    for r in rows:
        flag = "MISMATCH" if r.mismatch else "ok"
        lines.append(f"{r.name:<20}{r.computed:>16.6g}{r.quoted:>12.6g}  {flag}")
    return "\n".join(lines)
