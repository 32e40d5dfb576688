"""Knowledge-excess duality and Bell-inequality violation for two-qubit states."""
from .bell import EulerAngles, NormalForm, bell_max, euler_rotation, normal_form, rotated_excess_bounds
from .filtering import FilterOutcome, filter_to_bell_diagonal, verify_filter_monotonicity
from .harness import (
    DualityReport,
    SweepSummary,
    filtered_duality,
    same_meter_sweep,
    saturation_search,
    sweep_random,
    verify_duality,
)
from .knowledge import (
    KnowledgeResult,
    apriori_knowledge,
    distinguishability_excess,
    distinguishability_excess_trace_norm,
    knowledge,
    optimal_meter_axis,
)
from .measurement import X, Y, Z, MeasurementAxis, decompose, is_complementary, outcome_statistics, projectors
from .states import (
    BlochForm,
    LocalFilter,
    TwoQubitState,
    apply_local_filter,
    apply_local_unitary,
    bell_mixture,
    bloch_compose,
    bloch_decompose,
    depolarized_state,
    pure_schmidt,
    random_state,
    validate,
    werner,
)

__version__ = "0.1.0"
