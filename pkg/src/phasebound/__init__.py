"""Phase-precision limits of lossy two-mode interferometers.

The package computes quantum Cramer-Rao bounds on phase-sum and
phase-difference estimation for passive (beam-splitter) and amplifying
(two-mode-squeezer) interferometers fed with a coherent state and a
squeezed vacuum, with photon loss handled through a gamma-indexed
family of Kraus decompositions whose tightest member is found either
analytically or by direct minimization.
"""

from .errors import (
    AssumptionViolation,
    CutoffTooSmall,
    DegenerateStatistics,
    NonFiniteObjective,
    NonpositiveInformation,
    PhaseboundError,
    SingularComplement,
)
from .moments import (
    Correlations,
    InterferometerInput,
    ModeStatistics,
    SplitterKind,
    SplitterSpec,
    derived_correlations,
    lbs_moments,
    nbs_moments,
)
from .optimizer import (
    LossFamily,
    OptimizationResult,
    SingleArm,
    TwoArmIndependent,
    TwoArmSymmetric,
    minimize_scalar,
    optimize_gamma,
)
from .qfim_ideal import (
    EstimationMode,
    FisherMatrix,
    PrecisionBound,
    Target,
    overestimation,
    qcrb,
    qfim_matrix,
    two_param_bound,
)
from .qfim_lossy import (
    Regime,
    SingleArmLoss,
    TwoArmLoss,
    c_bound,
    c_bound_two_symmetric,
    c_matrix_single,
    c_matrix_two,
    gamma_opt_single,
    high_loss_two_arm,
    limit_bound_single,
    optimal_bound_single,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation",
    "Correlations",
    "CutoffTooSmall",
    "DegenerateStatistics",
    "EstimationMode",
    "FisherMatrix",
    "InterferometerInput",
    "LossFamily",
    "ModeStatistics",
    "NonFiniteObjective",
    "NonpositiveInformation",
    "OptimizationResult",
    "PhaseboundError",
    "PrecisionBound",
    "Regime",
    "SingleArm",
    "SingleArmLoss",
    "SingularComplement",
    "SplitterKind",
    "SplitterSpec",
    "Target",
    "TwoArmIndependent",
    "TwoArmLoss",
    "TwoArmSymmetric",
    "c_bound",
    "c_bound_two_symmetric",
    "c_matrix_single",
    "c_matrix_two",
    "derived_correlations",
    "gamma_opt_single",
    "high_loss_two_arm",
    "lbs_moments",
    "limit_bound_single",
    "minimize_scalar",
    "nbs_moments",
    "optimal_bound_single",
    "optimize_gamma",
    "overestimation",
    "qcrb",
    "qfim_matrix",
    "two_param_bound",
    "__version__",
]
