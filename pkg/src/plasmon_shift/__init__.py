"""Level shift and decay dynamics of a two-level emitter in a structured
electromagnetic reservoir, with a semi-analytic metal-nanosphere model and an
ingestion path for externally computed coupling spectra."""

from .backend import BACKEND
from .constants import vacuum_decay_rate_ev
from .dynamics import (
    DecayTrajectory,
    DynamicsProblem,
    EvolutionSpectrum,
    NormalizationError,
    evolution_spectrum,
    memory_kernel,
    shift_for_problem,
    spectral_dynamics,
    volterra_solve,
    weak_coupling_decay,
)
from .levelshift import (
    LevelShiftTable,
    QuadraturePolicy,
    ShiftComparison,
    compare_methods,
    delta_hilbert,
    delta_imag_axis,
    delta_sub_kk,
    delta_zero,
    gamma_of,
    imag_axis_tail,
    shift_table,
)
from .materials import (
    DrudeModel,
    TabulatedModel,
    UnsupportedFrequencyError,
    drude_eps,
    drude_gold,
    load_permittivity_table,
    tabulated_eps,
)
from .mie import (
    MultipoleSeriesPolicy,
    SeriesConvergenceError,
    SphereSystem,
    mie_tm_reflection,
    scattering_g_rr,
    static_g_rr,
    vacuum_im_g,
)
from .spectrum import (
    CouplingSpectrum,
    SpectrumParseError,
    SpectrumValidationError,
    ZeroFreqExtrapolation,
    emit_spectrum,
    extrapolate_zero,
    from_sphere,
    ingest_spectrum,
    resample,
    sphere_frequency_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CouplingSpectrum",
    "DecayTrajectory",
    "DrudeModel",
    "DynamicsProblem",
    "EvolutionSpectrum",
    "LevelShiftTable",
    "MultipoleSeriesPolicy",
    "NormalizationError",
    "QuadraturePolicy",
    "SeriesConvergenceError",
    "ShiftComparison",
    "SphereSystem",
    "SpectrumParseError",
    "SpectrumValidationError",
    "TabulatedModel",
    "UnsupportedFrequencyError",
    "ZeroFreqExtrapolation",
    "compare_methods",
    "delta_hilbert",
    "delta_imag_axis",
    "delta_sub_kk",
    "delta_zero",
    "drude_eps",
    "drude_gold",
    "emit_spectrum",
    "evolution_spectrum",
    "extrapolate_zero",
    "from_sphere",
    "gamma_of",
    "imag_axis_tail",
    "ingest_spectrum",
    "load_permittivity_table",
    "memory_kernel",
    "mie_tm_reflection",
    "resample",
    "scattering_g_rr",
    "shift_for_problem",
    "shift_table",
    "spectral_dynamics",
    "sphere_frequency_grid",
    "static_g_rr",
    "tabulated_eps",
    "vacuum_decay_rate_ev",
    "vacuum_im_g",
    "volterra_solve",
    "weak_coupling_decay",
]
