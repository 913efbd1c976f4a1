"""Binary PSO variants for wrapper feature selection.

Three variants share one loop:

``pso``
    Binary PSO with unit inertia.
``alt_pso``
    Unit inertia plus the altruism step after every evaluation.
``aapso``
    Altruism plus the time-adaptive inertia weight of :func:`adaptive_weight`.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import holdout_indices, select_columns, stratified_kfold
from .knn import KnnConfig, Metrics, knn_classify, score
from .rng import RngStream, derive_seed
from .swarm import (
    Evaluator,
    binarize,
    binarize_vector,
    evaluate_swarm,
    init_swarm,
    repair_mask,
    sigmoid,
)

VARIANTS = ("pso", "alt_pso", "aapso")
SCHEDULES = ("remaining", "elapsed")
FITNESS_PROTOCOLS = ("cv", "holdout")


@dataclass(frozen=True)
class AltruismParams:
    """Elite fraction and the selection-probability band for altruism.

    ``alpha_v`` and ``beta_v`` are velocity thresholds; ``p`` and ``gamma`` are
    their sigmoid images.
    """

    k_frac: float = 0.40
    alpha_v: float = 0.0
    beta_v: float = math.log(4.0)

    def __post_init__(self):
        if not 0.0 <= self.k_frac < 0.5:
            raise ValueError(f"k_frac must lie in [0, 0.5), got {self.k_frac}")
        if not self.alpha_v < self.beta_v:
            raise ValueError("alpha_v must be below beta_v")

    @property
    def p(self):
        return sigmoid(self.alpha_v)

    @property
    def gamma(self):
        return sigmoid(self.beta_v)

    def n_elite(self, n_agents):
        return int(math.floor(self.k_frac * n_agents + 0.5))


@dataclass(frozen=True)
class AdaptiveParams:
    c: float = 1.0
    schedule: str = "remaining"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")


@dataclass(frozen=True)
class SwarmConfig:
    population: int = 20
    iterations: int = 30
    alpha: float = 0.98
    fitness_protocol: str = "cv"
    fitness_folds: int = 5
    validation_fraction: float = 0.2
    per_dimension_r: bool = False

    def __post_init__(self):
        if self.population < 3:
            raise ValueError(f"population must be >= 3, got {self.population}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.fitness_protocol not in FITNESS_PROTOCOLS:
            raise ValueError(f"fitness_protocol must be one of {FITNESS_PROTOCOLS}")
        if self.fitness_folds < 2:
            raise ValueError(f"fitness_folds must be >= 2, got {self.fitness_folds}")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError(f"validation_fraction must lie in (0, 1), got {self.validation_fraction}")


@dataclass
class RunResult:
    best_mask: np.ndarray
    best_fitness: float
    fitness_trace: list
    selected_count: int
    test_metrics: Metrics
    variant: str
    seed: int
    validation_accuracy: float = float("nan")
    evaluations: int = 0
    selected_features: list = field(default_factory=list)

    def as_dict(self):
        return {
            "variant": self.variant,
            "seed": self.seed,
            "best_mask": "".join("1" if b else "0" for b in self.best_mask),
            "best_fitness": self.best_fitness,
            "selected_count": self.selected_count,
            "selected_features": list(self.selected_features),
            "validation_accuracy": self.validation_accuracy,
            "evaluations": self.evaluations,
            "fitness_trace": list(self.fitness_trace),
            "test_metrics": self.test_metrics.as_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            best_mask=np.array([c == "1" for c in d["best_mask"]]),
            best_fitness=d["best_fitness"],
            fitness_trace=list(d["fitness_trace"]),
            selected_count=d["selected_count"],
            test_metrics=Metrics.from_dict(d["test_metrics"]),
            variant=d["variant"],
            seed=d["seed"],
            validation_accuracy=d["validation_accuracy"],
            evaluations=d["evaluations"],
            selected_features=list(d["selected_features"]),
        )


def adaptive_weight(t, T, params=AdaptiveParams()):
    """Inertia weight at iteration ``t`` of ``T``.

    ``remaining``: ``1 - exp(-c (T - t) / T)``, falling from ``1 - e^-c`` to 0.
    ``elapsed``: ``1 - exp(-c t / T)``, the mirrored schedule.
    """
    if T < 1 or not 0 <= t <= T:
        raise ValueError(f"need 0 <= t <= T and T >= 1, got t={t}, T={T}")
    frac = (T - t) / T if params.schedule == "remaining" else t / T
    return 1.0 - math.exp(-params.c * frac)


def update_velocity(agent, gbest_mask, w, rng, per_dimension=False):
    """New velocity ``w v + r1 (pbest - x) + r2 (gbest - x)``.

    ``r1`` and ``r2`` are drawn once per call (per agent), or once per dimension
    with ``per_dimension``.
    """
    dim = len(agent.velocity)
    if per_dimension:
        r1, r2 = rng.random_array(dim), rng.random_array(dim)
    else:
        r1 = rng.random()
        r2 = rng.random()
    x = agent.mask.astype(float)
    return (
        w * agent.velocity
        + r1 * (agent.pbest_mask.astype(float) - x)
        + r2 * (np.asarray(gbest_mask, dtype=float) - x)
    )


def update_positions(state, rng, evaluate):
    """Resample every mask bit from its velocity, repair empty masks, then
    evaluate and refresh personal and global bests."""
    for agent in state.agents:
        agent.mask = repair_mask(binarize_vector(agent.velocity, rng), rng)
    return evaluate_swarm(state, evaluate)


def rank_by_fitness_change(agents):
    """Agent indices ordered best to worst by ``fitness - prev_fitness``.

    Ties go to the higher current fitness, then the lower index.
    """
    return sorted(
        range(len(agents)),
        key=lambda i: (-(agents[i].fitness - agents[i].prev_fitness), -agents[i].fitness, i),
    )


def altruism(state, params, rng, order=None, transfers=None):
    """Donate (bit, velocity) pairs from better to worse non-elite agents.

    ``order`` defaults to :func:`rank_by_fitness_change`. The top
    ``round(k_frac * N)`` agents are left untouched. The rest, in ranked order,
    pair best-with-worst; a middle agent of an odd count sits out. For each
    dimension of a donor the transfer fires with probability drawn from the
    ``(p, gamma)`` band when its velocity lies strictly between ``alpha_v`` and
    ``beta_v``, and with probability one half otherwise. A fired transfer copies
    the donor's bit and velocity to the recipient, then resets the donor's
    velocity uniformly on [0, 1) and resamples its bit.

    Mutates ``state`` in place and returns it. When ``transfers`` is a list,
    ``(donor, recipient, dim)`` triples are appended to it.
    """
    n = state.n_agents
    if n < 3:
        raise ValueError(f"altruism needs at least 3 agents, got {n}")
    if order is None:
        order = rank_by_fitness_change(state.agents)
    rest = list(order)[params.n_elite(n):]
    m = len(rest)
    p, gamma = params.p, params.gamma
    touched = set()
    for i in range(m // 2):
        d_idx, r_idx = rest[i], rest[m - 1 - i]
        donor, recipient = state.agents[d_idx], state.agents[r_idx]
        for j in range(len(donor.velocity)):
            v = donor.velocity[j]
            if params.alpha_v < v < params.beta_v:
                draw = rng.random()
                fire = draw < rng.uniform(p, gamma)
            else:
                fire = rng.random() < 0.5
            if not fire:
                continue
            recipient.mask[j] = donor.mask[j]
            recipient.velocity[j] = v
            donor.velocity[j] = rng.random()
            donor.mask[j] = bool(binarize(donor.velocity[j], rng))
            touched.update((d_idx, r_idx))
            if transfers is not None:
                transfers.append((d_idx, r_idx, j))
    for idx in sorted(touched):
        agent = state.agents[idx]
        agent.mask = repair_mask(agent.mask, rng)
    return state


def optimize(evaluate, dim, config=SwarmConfig(), rng=None, *, variant="aapso",
             altruism_params=AltruismParams(), adaptive_params=AdaptiveParams(),
             callback=None):
    """Run one variant against a mask evaluator.

    ``evaluate(mask)`` must return ``(fitness, accuracy)``. Returns the final
    :class:`SwarmState` and the per-iteration global best fitness.
    ``callback(state)`` is invoked after every state mutation.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    rng = RngStream(0) if rng is None else rng
    adaptive = variant == "aapso"
    altruistic = variant in ("alt_pso", "aapso")
    T = config.iterations

    state = init_swarm(config.population, dim, rng, max_iter=T)
    evaluate_swarm(state, evaluate)
    for agent in state.agents:
        agent.prev_fitness = agent.fitness
    _notify(callback, state)

    trace = []
    for t in range(1, T + 1):
        state.t = t
        w = adaptive_weight(t, T, adaptive_params) if adaptive else 1.0
        for agent in state.agents:
            agent.velocity = update_velocity(
                agent, state.gbest_mask, w, rng, per_dimension=config.per_dimension_r
            )
        update_positions(state, rng, evaluate)
        _notify(callback, state)
        if altruistic:
            before = [a.mask.copy() for a in state.agents]
            altruism(state, altruism_params, rng)
            changed = [i for i, a in enumerate(state.agents) if not np.array_equal(a.mask, before[i])]
            evaluate_swarm(state, evaluate, agents=changed)
            _notify(callback, state)
        for agent in state.agents:
            agent.prev_fitness = agent.fitness
        trace.append(state.gbest_fitness)
    return state, trace


def _notify(callback, state):
    if callback is not None:
        callback(state)


def fitness_splits(train, config, seed):
    """Internal ``(fit_idx, val_idx)`` splits of the training rows used for
    fitness: stratified k-fold (``cv``) or one stratified holdout."""
    if config.fitness_protocol == "cv":
        return stratified_kfold(train, config.fitness_folds, seed, strict=False).folds
    return [holdout_indices(train, config.validation_fraction, seed, strict=False)]


def run(variant, train, test, config=SwarmConfig(), knn=KnnConfig(),
        altruism_params=AltruismParams(), adaptive_params=AdaptiveParams(),
        seed=0, split_seed=None, positive_class=None):
    """Select features on ``train`` and report held-out metrics on ``test``.

    Both datasets should already be normalized. Fitness accuracy comes from
    internal splits of ``train`` only (see :func:`fitness_splits`); the final
    classifier uses all of ``train`` with the best mask, and ``test`` is
    touched once, for the reported metrics.
    """
    if split_seed is None:
        split_seed = derive_seed("validation", seed)
    evaluate = Evaluator(train, fitness_splits(train, config, split_seed), knn, config.alpha)
    state, trace = optimize(
        evaluate, train.n_features, config, RngStream(seed), variant=variant,
        altruism_params=altruism_params, adaptive_params=adaptive_params,
    )
    mask = state.gbest_mask.copy()
    pred = knn_classify(select_columns(train, mask), select_columns(test, mask), knn)
    metrics = score(pred, test.labels, positive_class)
    return RunResult(
        best_mask=mask,
        best_fitness=state.gbest_fitness,
        fitness_trace=trace,
        selected_count=int(mask.sum()),
        test_metrics=metrics,
        variant=variant,
        seed=int(seed),
        validation_accuracy=evaluate(mask)[1],
        evaluations=evaluate.calls,
        selected_features=[n for n, b in zip(train.feature_names, mask) if b],
    )
