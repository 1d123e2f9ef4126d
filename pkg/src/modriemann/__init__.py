"""Classic and modified Riemann-Stieltjes sums with brute-force limit oracles."""

__version__ = "0.1.0"

from .core import (
    LEFT,
    MID,
    RIGHT,
    Interval,
    Partition,
    SamplePointRule,
    common_refinement,
    pairwise_sum,
    sample_point,
    seeded,
    uniform_partition,
)
from .errors import (
    CellTooWide,
    DomainError,
    ExprSyntaxError,
    HypothesisViolation,
    InvalidArgument,
    ModRiemannError,
    NoSignChange,
    ScheduleTooCoarse,
    UnknownIdentifier,
)
from .mapping import (
    CellImage,
    IntervalMap,
    Placement,
    apply_map,
    gamma_left,
    length_phi,
    lipschitz_image,
    solve_monotone,
    weighted_target_c,
    weighted_target_d,
)
from .modsum import (
    ConvergenceReport,
    LimitPrediction,
    ModifiedSumReport,
    convergence_study,
    modified_sums,
    predict_limit,
    theorem_b_diagnostics,
)
from .stieltjes import (
    RealFunction,
    SumReport,
    Weight,
    lower_sum,
    oracle_integral,
    oscillation_sum,
    psi_length,
    refine_until,
    riemann_sum,
    upper_sum,
)
