"""Majority dynamics on Erdos-Renyi random graphs.

A fast synchronous majority-update engine plus the diagnostic
quantities and probability bounds needed to study when an initial
advantage wins, and a seeded Monte Carlo harness for thresholds and
scaling fits.
"""

from .analysis import (
    AlmostRedReport,
    RegularityReport,
    almost_red_set,
    flipping_set,
    regularity_report,
    signed_discrepancies,
    signed_discrepancy,
    vulnerable_set,
)
from .bounds import (
    DEFAULT_CONSTANTS,
    AlmostRedEstimate,
    CollisionResult,
    ConstantsConfig,
    TailQuery,
    TheoryThresholds,
    almost_red_probability_estimate,
    chernoff_tail,
    collision_probability,
    exact_tail,
    gaussian_cdf,
    kl_divergence,
    poisson_tail_bound,
    theory_thresholds,
    window_bound,
)
from .coloring import (
    BLUE,
    RED,
    Coloring,
    DefectorScenario,
    balanced_with_defectors,
    dump_coloring,
    fixed_advantage,
    load_coloring,
    random_half,
)
from .dynamics import (
    DaySummary,
    LandslideRow,
    Outcome,
    OutcomeKind,
    Trajectory,
    landslide_profile,
    run,
    step,
)
from .errors import BracketingError, ConfigError, ParameterError, ValidationError
from .graphs import (
    Graph,
    ModelParams,
    dump_edge_list,
    from_edge_list,
    generate_gnp,
    graph_stats,
    load_edge_list,
)
from .harness import (
    CSV_COLUMNS,
    SCHEMES,
    ExperimentConfig,
    ScalingFit,
    TrialRecord,
    TrialSummary,
    mix64,
    run_trials,
    scaling_fit,
    summary_row,
    sweep,
    threshold_bisect,
    wilson_interval,
)

__version__ = "0.1.0"
