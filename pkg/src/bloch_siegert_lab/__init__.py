"""Bloch-Siegert physics of the driven two-level system.

Resonance shifts over the full drive-strength range by five independent
methods, plus dissipative observables (time-averaged populations and
probe spectra) in the counter-rotating hybridized rotating frame.
"""

from .chrw import (
    ChrwFrame,
    FrameMode,
    LabPopulationMap,
    ModelParams,
    bessel_argument,
    build_frame,
    dressed_states,
    lab_population_map,
    solve_xi,
    xi_fixed_point_residual,
)
from .dissipative import (
    FourierCoefficients,
    RateSet,
    SteadyState,
    bloch_evolve,
    bloch_generator,
    dressed_components,
    dressed_to_lab_population,
    fourier_coefficients,
    fourier_f,
    lindblad_tensor,
    observation_grid,
    oracle_lindblad,
    population_avg,
    population_avg_approx,
    population_time,
    rates,
    steady_state,
    truncation_order,
    x_coefficients,
    x_minus_coefficients,
)
from .errors import (
    BranchAmbiguityError,
    BslError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    GridError,
    NonUnitaryError,
    NoSignChangeError,
    PoleError,
    TruncationWarning,
    ValidityWarning,
)
from .floquet import (
    FloquetSolution,
    average_transition_probability,
    branch_gap,
    build_floquet_matrix,
    circle_gap,
    default_truncation,
    dq_domega0,
    fold_to_zone,
    monodromy_gap,
    monodromy_quasienergies,
    pbar,
    propagator_samples,
    solve_floquet,
)
from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    bessel_j,
    bessel_j0_minus_1,
    bessel_j_sequence,
    find_root_bracketed,
    first_bessel_j0_zero,
    minimize_scalar_bracketed,
)
from .resonance import (
    DeviationRow,
    Method,
    ShiftResult,
    bs_asymptotic,
    bs_chrw,
    bs_floquet_numeric,
    bs_perturbative6,
    bs_shirley_iterative,
    deviation_table,
    resonance_shift,
)
from .spectrum import (
    Normalization,
    SpectrumTrace,
    asymmetry_metric,
    chat_coefficients,
    default_sideband_count,
    initial_conditions,
    laplace_g,
    response_denominator,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguityError",
    "BslError",
    "ChrwFrame",
    "ConvergenceError",
    "DEFAULT_TOL",
    "DegenerateInputError",
    "DeviationRow",
    "DomainError",
    "FrameMode",
    "GridError",
    "LabPopulationMap",
    "Method",
    "ModelParams",
    "NoSignChangeError",
    "NonUnitaryError",
    "PoleError",
    "ShiftResult",
    "Tolerance",
    "TruncationWarning",
    "ValidityWarning",
    "FloquetSolution",
    "FourierCoefficients",
    "Normalization",
    "RateSet",
    "SpectrumTrace",
    "SteadyState",
    "asymmetry_metric",
    "average_transition_probability",
    "bessel_argument",
    "bessel_j",
    "bessel_j0_minus_1",
    "bessel_j_sequence",
    "branch_gap",
    "build_floquet_matrix",
    "circle_gap",
    "default_truncation",
    "dq_domega0",
    "fold_to_zone",
    "monodromy_gap",
    "monodromy_quasienergies",
    "pbar",
    "propagator_samples",
    "bloch_evolve",
    "bloch_generator",
    "bs_asymptotic",
    "bs_chrw",
    "bs_floquet_numeric",
    "bs_perturbative6",
    "bs_shirley_iterative",
    "build_frame",
    "chat_coefficients",
    "default_sideband_count",
    "deviation_table",
    "dressed_components",
    "dressed_states",
    "dressed_to_lab_population",
    "find_root_bracketed",
    "first_bessel_j0_zero",
    "fourier_coefficients",
    "fourier_f",
    "initial_conditions",
    "lab_population_map",
    "laplace_g",
    "lindblad_tensor",
    "minimize_scalar_bracketed",
    "observation_grid",
    "oracle_lindblad",
    "population_avg",
    "population_avg_approx",
    "population_time",
    "rates",
    "resonance_shift",
    "response_denominator",
    "solve_floquet",
    "solve_xi",
    "spectrum",
    "steady_state",
    "truncation_order",
    "x_coefficients",
    "x_minus_coefficients",
    "__version__",
]
