"""Numerical laboratory for radial Liouville-type equations.

Shooting for weighted radial Cauchy problems and their mass function,
mass-curve analysis (limits, minimizer, multiplicity), the vanishing-
regularization collapse experiment, blow-up point configurations, closed
form mass relations, and a log-polar finite-difference disk solver.
"""

from .errors import (
    BranchLost,
    DivergedStep,
    EmptyWindow,
    InvalidInputs,
    InvalidParams,
    InvalidWeight,
    LiouvilleLabError,
    MissingZero,
    NewtonDiverged,
    NoBracket,
    NoInteriorMin,
    NoSolution,
    NotConverged,
    NumericalError,
    ResidualTooLarge,
    SingularJacobian,
    ValidationError,
)
from .disk_solver import (
    ContinuationControl,
    DiskControl,
    DiskGrid,
    DiskProblem,
    DiskSolution,
    ScalingReport,
    StepRecord,
    blowup_points,
    bubble_cap_init,
    continuation_in_t,
    enclosed_mass,
    exact_bubble,
    exact_singular_bubble,
    load_solution,
    mass_balance,
    pohozaev_residual,
    radial_field,
    save_solution,
    solve,
)
from .mass_relations import (
    BubbleSpec,
    HeightInputs,
    MassPair,
    admissible_masses,
    beta_to_rho,
    bubble_normalization,
    bubble_value,
    concentration_threshold,
    necessary_range_contains,
    pohozaev_sigma,
    predict_height,
    quantized_mass_check,
    rho_to_beta,
)
from .collapse_experiment import (
    CollapseRecord,
    CollapseReport,
    CollapseRun,
    a_pow_from_rho,
    admissible_rho_window,
    limit_profile,
    limit_xi_at,
    run_collapse,
)
from .mass_curve import (
    CurveSample,
    MassCurve,
    SolvabilityReport,
    classify,
    find_min,
    solve_for_mass,
    sweep,
)
from .vortex_configuration import (
    BlowupConfiguration,
    VortexParams,
    characteristic_polynomial,
    find_points,
    newton_oracle,
    symmetric_functions,
)
from .radial_shooting import (
    IntegrationControl,
    LinearizedSolution,
    MassResult,
    RadialSolution,
    WeightSpec,
    ZeroStructure,
    beta,
    integrate_cauchy,
    kelvin,
    linearized,
    mass_of,
    ode_residual,
    zero_structure,
)

__version__ = "0.1.0"
