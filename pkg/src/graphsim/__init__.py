"""Deterministic QAOA state-vector simulation of whole-graph similarity."""

from .graphs import (
    Graph,
    brute_force_best,
    deform,
    edge_difference,
    erdos_renyi,
    format_graph_text,
    load_graph,
    parse_graph_text,
    save_graph,
    similarity,
)
from .permutations import factorial, is_feasible, kth_permutation, qubit_count, tail_stats
from .hamiltonians import (
    CostDiagonal,
    MixerMatrix,
    build_cost_diagonal,
    build_mixer,
    eigen_bounds,
    load_cost_diagonal,
    save_cost_diagonal,
)
from .evolution import (
    ConvergenceError,
    ExpmWorkspace,
    apply_phase,
    bessel_j,
    dense_expm_oracle,
    expm_action,
)
from .qaoa import (
    Metrics,
    QaoaParams,
    compute_metrics,
    cost_distribution,
    evolve,
    evolve_npo,
    expectation,
    initial_state,
    sample,
)
from .optimize import MinimizeResult, OptimizerBudget, SearchBox, minimize
from .harness import (
    DistributionPlan,
    ExperimentConfig,
    TrialRecord,
    distribution_cost,
    run_experiment,
    state_partition,
)

__version__ = "0.1.0"
