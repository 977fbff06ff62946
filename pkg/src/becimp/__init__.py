"""becimp: coupled mean-field simulations of a single pinned excited
impurity in a trapped quasi-1D Bose-Einstein condensate."""

__version__ = "0.1.0"

from .grid import (
    ComplexField,
    Grid1D,
    make_grid,
    moment,
    norm2,
    normalize,
    project_odd,
    spectral_kinetic_phase,
)
from .solver import (
    BlowUpError,
    ModelParams,
    QuenchSchedule,
    Segment,
    SnapshotSeries,
    SystemState,
    energy,
    energy_components,
    evolve,
    potential_B,
    potential_I,
    step,
)
from .stationary import (
    ImprintDescriptor,
    RelaxationReport,
    classify_imprint,
    relax_coupled,
    trial_impurity,
    zeno_durability_experiment,
)
from .observables import (
    ObservableSeries,
    ShockSignature,
    VariationalWidth,
    count_fringes,
    depleted_density,
    dominant_frequency,
    effective_mass_ratio,
    persistent_tracks,
    shock_signature,
    track_minima,
    variational_width,
    width_series,
)
from .analytics import (
    DerivedScales,
    PhysicalParams,
    comparison_report,
    healing_check,
    nondimensionalize,
    quantum_depletion_fraction,
    thermal_depletion,
    thomas_fermi_profile,
)
