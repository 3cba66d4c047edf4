"""Weak control of a feedback loop: set-valued commands, free decisions.

The controller publishes a whole set of admissible actions each step instead
of a single command; any decision maker (an optimizer, a random prober, or a
live human behind the session service) picks from that set.  An internal
plant model makes the loop an open cascade, so stability holds for every
admissible decision, and an online learner reshapes the candidate sets to
cut the decision maker's achievable cost while a steady-state performance
budget stays enforced.
"""

from .controller import IMCController, cascade_response
from .decision import (
    ExternalPolicy,
    ExtremePolicy,
    NominalPolicy,
    OptimizerPolicy,
    QuadraticCost,
    RandomPolicy,
    decide,
    minimize_on_box,
    minimize_on_segment,
)
from .errors import (
    ConfigError,
    DecisionPendingError,
    DegenerateDirectionError,
    DiscretizationError,
    InstabilityError,
    InteriorityError,
    NotSettledError,
    NumericalError,
    OptimizationError,
    RankError,
    SelectionError,
    SingularityError,
    StabilityError,
    UnboundedGammaError,
    WeakloopError,
)
from .expander import (
    AdmissibleSet,
    Box,
    BoxExpander,
    Segment,
    SegmentExpander,
    contains,
    select,
)
from .learner import (
    LearnerState,
    PerfBudget,
    estimate_ustar,
    is_interior,
    learner_step,
    max_gamma,
    perturb_direction,
    record_hyperplane,
    update_direction,
)
from .lti import (
    DiscreteStateSpace,
    PlantState,
    StateSpace,
    dc_gain,
    discrete_dc_gain,
    is_hurwitz,
    step,
    zoh_discretize,
)
from .sim import (
    LoopSession,
    ScenarioConfig,
    TraceRecord,
    apply_case,
    audit_membership,
    benchmark_config,
    emit_trace,
    parse_trace,
    run_case,
    steady_state,
)
from .verify import (
    PerfReport,
    frequency_sweep,
    ke_dc_residual,
    nominal_perf_dc,
    stability_probe,
    worst_case_dc,
)

__version__ = "0.1.0"
