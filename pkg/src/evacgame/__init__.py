"""Evacuation-decision dynamics on social networks.

A seedable simulator of household evacuate/stay decisions evolving under an
evolutionary-game imitation rule, with degree-based prioritisation scenarios
and deterministic parameter sweeps.
"""

__version__ = "0.1.0"

from .network import (
    PAPER_HISTOGRAM,
    DegreeRank,
    Graph,
    Order,
    degree_histogram,
    degree_rank,
    generate_from_histogram,
    generate_small_world,
    load_edge_list,
    save_edge_list,
)
from .payoff import (
    Decision,
    PayoffMatrix,
    PayoffParams,
    baseline_matrix,
    incentive_matrix,
    pair_payoff,
    paper_coefficient_matrix,
)
from .scenario import ScenarioSpec, Variant, initialize_decisions, priority_set
from .dynamics import (
    NeighborSampling,
    SimulationConfig,
    SimulationState,
    Trajectory,
    accumulate_payoffs,
    imitation_probability,
    run,
    step,
)
from .metrics import (
    ContributionRow,
    aggregate_runs,
    decision_heatmap,
    degree_contribution,
    evacuation_rate,
    final_rate,
    switch_counts_by_degree,
)
from .sweep import (
    CellRecord,
    DynamicsSpec,
    SweepGrid,
    SweepResult,
    run_cell,
    run_sweep,
    threshold_experiment,
)
