"""Pieces shared by every optimizer variant: agents, the sigmoid transfer
function, the weighted accuracy/reduction fitness and wrapper evaluation."""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .dataset import Dataset
from .knn import KnnConfig, classify_codes, encode_labels

TIE_EPS = 1e-12


def sigmoid(x):
    """S-shaped transfer function ``1 / (1 + exp(-x))``; stable for any float."""
    if np.ndim(x) == 0:
        return float(expit(x))
    return expit(x)


def binarize(v, rng):
    """One bit: 1 when ``sigmoid(v) >= rand``. Consumes exactly one draw."""
    return int(sigmoid(v) >= rng.random())


def binarize_vector(velocity, rng):
    """Bitwise :func:`binarize`, one draw per entry in order."""
    return sigmoid(np.asarray(velocity, dtype=float)) >= rng.random_array(len(velocity))


@dataclass(frozen=True)
class FitnessParams:
    total_features: int
    alpha: float = 0.98

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.total_features < 1:
            raise ValueError("total_features must be positive")


def fitness(accuracy, selected, params):
    """``alpha * accuracy + (1 - alpha) * (D - d) / D``; larger is better."""
    d, total = int(selected), params.total_features
    if not 1 <= d <= total:
        raise ValueError(f"selected count {d} outside [1, {total}]")
    return params.alpha * accuracy + (1.0 - params.alpha) * (total - d) / total


def evaluate_mask(mask, fit_data, val_data, knn, params):
    """Fitness and validation accuracy of a feature mask.

    The k-NN is fitted on ``fit_data`` restricted to the masked columns and
    scored on ``val_data``. Returns ``(fitness, accuracy)``.
    """
    return Evaluator.from_pair(fit_data, val_data, knn, params.alpha)(mask)


class Evaluator:
    """Memoised mask scorer over one dataset and a list of internal
    ``(fit_idx, val_idx)`` splits.

    Accuracy is pooled over all validation rows of all splits, so a list of
    k-fold splits gives cross-validated accuracy and a single pair gives plain
    holdout accuracy. Results are cached by mask bytes; ``calls`` counts real
    k-NN evaluations.
    """

    def __init__(self, data, splits, knn=KnnConfig(), alpha=0.98):
        self.knn = knn
        self.params = FitnessParams(data.n_features, alpha)
        self._x = data.features
        self._codes, classes = encode_labels(data.labels)
        self._n_classes = len(classes)
        self._splits = [(np.asarray(f, dtype=int), np.asarray(v, dtype=int)) for f, v in splits]
        if not self._splits:
            raise ValueError("need at least one split")
        self._n_val = sum(len(v) for _, v in self._splits)
        self._cache = {}
        self.calls = 0

    @classmethod
    def from_pair(cls, fit_data, val_data, knn=KnnConfig(), alpha=0.98):
        if fit_data.n_features != val_data.n_features:
            raise ValueError("fit and validation data have different feature counts")
        joined = Dataset(
            np.vstack([fit_data.features, val_data.features]),
            np.concatenate([fit_data.labels, val_data.labels]),
            fit_data.feature_names,
        )
        n_fit = fit_data.n_samples
        split = (np.arange(n_fit), np.arange(n_fit, joined.n_samples))
        return cls(joined, [split], knn, alpha)

    def __call__(self, mask):
        mask = np.asarray(mask, dtype=bool)
        key = mask.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        d = int(mask.sum())
        if d == 0:
            raise ValueError("cannot evaluate an empty mask")
        x = self._x[:, mask]
        correct = 0
        for fit_idx, val_idx in self._splits:
            pred = classify_codes(
                x[fit_idx], self._codes[fit_idx], x[val_idx], self.knn.k, self._n_classes
            )
            correct += int(np.sum(pred == self._codes[val_idx]))
        accuracy = correct / self._n_val
        result = (fitness(accuracy, d, self.params), accuracy)
        self._cache[key] = result
        self.calls += 1
        return result


def is_better(cand_fitness, cand_count, inc_fitness, inc_count):
    """Strictly higher fitness wins; within ``TIE_EPS`` fewer features wins and
    the incumbent keeps the spot otherwise."""
    if cand_fitness > inc_fitness + TIE_EPS:
        return True
    return abs(cand_fitness - inc_fitness) <= TIE_EPS and cand_count < inc_count


@dataclass
class Agent:
    velocity: np.ndarray
    mask: np.ndarray
    pbest_mask: np.ndarray
    pbest_fitness: float = -np.inf
    fitness: float = -np.inf
    prev_fitness: float = -np.inf

    def copy(self):
        return Agent(
            self.velocity.copy(), self.mask.copy(), self.pbest_mask.copy(),
            self.pbest_fitness, self.fitness, self.prev_fitness,
        )


@dataclass
class SwarmState:
    agents: list
    gbest_mask: np.ndarray
    gbest_fitness: float = -np.inf
    t: int = 0
    T: int = 30

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def dim(self):
        return len(self.gbest_mask)

    def copy(self):
        return SwarmState(
            [a.copy() for a in self.agents], self.gbest_mask.copy(),
            self.gbest_fitness, self.t, self.T,
        )

    def refresh_gbest(self):
        for agent in self.agents:
            if is_better(
                agent.pbest_fitness, int(agent.pbest_mask.sum()),
                self.gbest_fitness, int(self.gbest_mask.sum()),
            ):
                self.gbest_fitness = agent.pbest_fitness
                self.gbest_mask = agent.pbest_mask.copy()


def repair_mask(mask, rng):
    """Return ``mask`` unchanged when it selects anything, else a copy with one
    uniformly chosen bit set (one draw)."""
    mask = np.asarray(mask, dtype=bool)
    if mask.any():
        return mask
    fixed = mask.copy()
    fixed[rng.index(len(fixed))] = True
    return fixed


def init_swarm(n_agents, dim, rng, max_iter=30):
    """Velocities uniform on [0, 1), masks sampled from them and repaired.

    Fitness fields start at ``-inf``; :func:`evaluate_swarm` fills them.
    """
    if n_agents < 2:
        raise ValueError(f"need at least 2 agents, got {n_agents}")
    agents = []
    for _ in range(n_agents):
        velocity = rng.random_array(dim)
        mask = repair_mask(binarize_vector(velocity, rng), rng)
        agents.append(Agent(velocity, mask, mask.copy()))
    return SwarmState(agents, agents[0].mask.copy(), T=max_iter)


def evaluate_swarm(state, evaluate, agents=None):
    """Score agents (all by default), then refresh personal and global bests."""
    indices = range(state.n_agents) if agents is None else agents
    for i in indices:
        agent = state.agents[i]
        agent.fitness = evaluate(agent.mask)[0]
        if is_better(agent.fitness, int(agent.mask.sum()),
                     agent.pbest_fitness, int(agent.pbest_mask.sum())):
            agent.pbest_fitness = agent.fitness
            agent.pbest_mask = agent.mask.copy()
    state.refresh_gbest()
    return state
