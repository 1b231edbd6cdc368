"""Quantized gossip averaging: simulation, random-walk analysis, and bounds."""

__version__ = "0.1.0"

from .graphs import (
    ConstantSchedule,
    GnpEveryTick,
    Graph,
    GraphSchedule,
    PeriodicSchedule,
    build_named,
    check_periodic_connectivity,
    empty_graph,
    is_connected,
    lollipop_graph,
    sample_gnp,
    union_graph,
)
from .quantization import (
    QState,
    QuantizerSpec,
    distribution,
    lyapunov,
    lyapunov_units,
    mean_units,
    quantize,
    spread,
    state_from_json,
    state_mean,
    state_to_json,
)
from .dynamics import RunRecord, TickEvent, af_step, as_step, compute_delta, has_converged, run
from .randwalk import (
    MeetingTimes,
    ProductChain,
    TransitionMatrix,
    absorb,
    edge_selection_prob,
    hitting_time_matrix,
    hitting_times_exact,
    matrix_from_csv,
    matrix_to_csv,
    meeting_chain,
    meeting_time_exact,
    meeting_time_mc,
    meeting_time_schedule,
    p_af,
    p_ar,
    p_as,
    p_sf,
    product_chain,
    reversibility_check,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    SummaryStats,
    emit,
    load_config,
    preset_lollipop_m0,
    preset_psi,
    preset_scaled_schedule,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
