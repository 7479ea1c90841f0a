"""Monte Carlo solver for divergence-form PDEs whose coefficient matrix is
discontinuous across a smooth interface.

The solver simulates the transformed Euler scheme: standard Euler steps
plus a co-normal rescaling correction whenever a step crosses the
interface, so that E[u0(X_T)] approximates the PDE solution at weak order
1/2.  A band-regularized baseline scheme, a deterministic 1D
Crank-Nicolson oracle, estimators for whole-space, killed and exit
problems, and convergence/occupation diagnostics round out the package.
"""

from .coefficients import (
    CoefficientField,
    ConormalField,
    PRESETS,
    RegularizedField,
    build_preset,
    chol_spd_lower,
    constant_field,
    paper_example_2d,
    piecewise_constant_1d,
    regularize,
)
from .errors import (
    ConfigError,
    InsufficientResolution,
    NoConvergence,
    NotInTube,
    NotPositiveDefinite,
    TangentField,
    TransmcError,
    UnstableConfig,
)
from .geometry import (
    Interface,
    LevelSetInterface,
    ObliqueFoot,
    PlanarInterface,
    Side,
    algebraic_distance,
    crossing_correction,
    project_oblique,
    side,
)
from .montecarlo import (
    PAYOFFS,
    ConstantPayoff,
    ConvergenceRow,
    ConvergenceStudy,
    EstimatorResult,
    RunConfig,
    UnitDisc,
    boundary_sin_cos,
    bump_initial,
    convergence_study,
    estimate_elliptic_exit,
    estimate_parabolic,
    estimate_parabolic_bounded,
    fit_loglog_slope,
    indicator_positive,
    occupation_diagnostic,
    occupation_estimates,
    oracle1d_max_discrepancy,
    run_estimator,
    squared_norm,
)
from .reference1d import Grid1D, Solution1D, cn_solve, flux_jump, richardson_value
from .scheme import (
    SchemeState,
    StepPlan,
    euler_increment,
    phi_inverse,
    phi_map,
    phi_transform_step,
    regularized_step,
    step_euler,
    step_regularized,
    step_transformed,
    transformed_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
