"""Binary particle swarm feature selection with adaptive inertia and
altruistic agents, wrapped around a k-NN evaluator."""
from .dataset import (
    Dataset,
    FoldPlan,
    NormalizationStats,
    apply_normalizer,
    fit_normalizer,
    holdout_indices,
    load_delimited,
    select_columns,
    stratified_holdout,
    stratified_kfold,
)
from .knn import KnnConfig, Metrics, knn_classify, score
from .optimizer import (
    AdaptiveParams,
    AltruismParams,
    RunResult,
    SwarmConfig,
    adaptive_weight,
    altruism,
    optimize,
    rank_by_fitness_change,
    run,
    update_positions,
    update_velocity,
)
from .rng import RngStream, TapeRng
from .stats import BoxSummary, StatReport, box_summary, mann_whitney_u
from .swarm import (
    Agent,
    Evaluator,
    FitnessParams,
    SwarmState,
    binarize,
    evaluate_mask,
    fitness,
    init_swarm,
    repair_mask,
    sigmoid,
)

__version__ = "0.1.0"
