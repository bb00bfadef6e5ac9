"""Continuum stick percolation toolkit.

Simulation engine and verification suite for percolation of radius-1
sticks of length L in d dimensions: exact geometry kernels, closed-form
measures and critical-intensity bounds, seeded Poisson sampling, cluster
and threshold analysis, the branching-process domination view, and the
oriented-percolation comparison model.
"""

from .errors import (
    BracketFailure,
    CapacityExceeded,
    DegenerateDesign,
    DomainError,
    InsufficientTrials,
    ParallelLines,
    PreconditionViolated,
    RejectionStall,
    StickPercError,
)
from .geometry import (
    Segment,
    Stick,
    line_line_distance_profile,
    line_line_t_min,
    line_point_distance_sq,
    min_distance_outside_window,
    segment_hits_ball,
    segment_segment_distance,
    sticks_intersect,
)
from .measures import (
    BoundsReport,
    ConstructionGeometry,
    ball_volume,
    c_d,
    c_d_prime,
    cap_hit_lower_bound,
    cap_hit_probability_exact,
    gw_offspring_bound,
    lattice_T_count,
    mc_cap_hit_probability,
    mc_stick_hit_volume,
    mc_two_ball_measure,
    stick_hit_volume,
    theorem_bounds,
    two_ball_lower_bound,
)
from .sampling import (
    BoundedDensity,
    BoxRegion,
    Configuration,
    Rigid,
    Uniform,
    poisson_count,
    sample_configuration,
    sample_direction,
    sample_window_configuration,
)
from .percolation import (
    CrossingResult,
    SpatialIndex,
    ThresholdEstimate,
    UnionFind,
    build_index,
    cluster,
    crossing_event,
    crossing_probability,
    estimate_threshold,
    scaling_fit,
)
from .branching import (
    GWReport,
    component_exploration,
    dominating_gw_run,
    offspring_mean_mc,
)
from .oriented import (
    Frontier,
    coupled_survival_monotonicity,
    op_step,
    survival_probability,
)
from .special import log_gamma, regularized_incomplete_beta

__version__ = "0.1.0"
