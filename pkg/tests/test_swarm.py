import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aapso.knn import KnnConfig
from aapso.rng import RngStream, TapeRng
from aapso.swarm import (
    Evaluator,
    FitnessParams,
    binarize,
    evaluate_mask,
    evaluate_swarm,
    fitness,
    init_swarm,
    is_better,
    repair_mask,
    sigmoid,
)

from conftest import brute_force_knn, make_dataset


class TestSigmoid:
    def test_examples(self):
        assert sigmoid(0.0) == 0.5
        assert sigmoid(math.log(4)) == pytest.approx(0.8, abs=1e-12)
        assert sigmoid(-math.log(4)) == pytest.approx(0.2, abs=1e-12)

    def test_extremes_are_finite(self):
        assert 0.0 <= sigmoid(-800.0) < 1e-300
        assert sigmoid(800.0) == 1.0

    def test_vector_input(self):
        out = sigmoid(np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_allclose(out, [1 / (1 + math.e), 0.5, 1 / (1 + math.exp(-1))])

    @given(st.floats(-50, 50, allow_nan=False))
    def test_symmetry(self, x):
        assert abs(sigmoid(-x) - (1 - sigmoid(x))) <= 1e-12

    @given(st.floats(-30, 30), st.floats(-30, 30))
    def test_monotone(self, a, b):
        if a < b and b - a > 1e-9:
            assert sigmoid(a) < sigmoid(b)


class TestBinarize:
    def test_forced_by_draw(self):
        assert binarize(0.0, TapeRng([0.3])) == 1
        assert binarize(-10.0, TapeRng([0.3])) == 0

    @pytest.mark.parametrize("draw", [1e-9, 0.25, 0.5, 0.999999])
    def test_saturated(self, draw):
        assert binarize(30.0, TapeRng([draw])) == 1

    def test_one_draw(self):
        rng = TapeRng([0.4, 0.9])
        binarize(1.0, rng)
        assert rng.remaining == 1

    def test_rate_at_zero(self):
        rng = RngStream(123)
        rate = np.mean([binarize(0.0, rng) for _ in range(100_000)])
        assert abs(rate - 0.5) <= 0.02


class TestFitness:
    def test_all_selected_perfect(self):
        assert fitness(1.0, 10, FitnessParams(10)) == pytest.approx(0.98)

    def test_worked_value(self):
        # 0.98 * 0.9837 + 0.02 * 349 / 512
        expected = 0.98 * 0.9837 + 0.02 * (512 - 163) / 512
        assert fitness(0.9837, 163, FitnessParams(512)) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.97766, abs=5e-6)

    def test_zero(self):
        assert fitness(0.0, 7, FitnessParams(7)) == 0.0

    @pytest.mark.parametrize("d", [0, 11, -1])
    def test_count_out_of_range(self, d):
        with pytest.raises(ValueError):
            fitness(0.5, d, FitnessParams(10))

    def test_bad_alpha(self):
        with pytest.raises(ValueError):
            FitnessParams(10, alpha=1.5)

    @given(st.floats(0, 1), st.integers(1, 49))
    def test_fewer_features_better(self, acc, d):
        params = FitnessParams(50)
        assert fitness(acc, d, params) > fitness(acc, d + 1, params)


class TestTieRule:
    def test_strictly_higher(self):
        assert is_better(0.9, 10, 0.8, 1)

    def test_tie_prefers_fewer(self):
        assert is_better(0.9, 3, 0.9 + 1e-13, 4)
        assert not is_better(0.9, 4, 0.9, 3)

    def test_full_tie_keeps_incumbent(self):
        assert not is_better(0.9, 3, 0.9, 3)


def _two_clusters():
    rng = np.random.default_rng(5)
    n = 40
    sep = np.r_[np.zeros(n // 2), np.ones(n // 2) * 10] + rng.random(n)
    noise = rng.random((n, 2))
    const = np.zeros(n)
    labels = np.array(["a"] * (n // 2) + ["b"] * (n // 2))
    x = np.column_stack([sep, noise, const])
    order = rng.permutation(n)
    return make_dataset(x[order], labels[order])


class TestEvaluateMask:
    def setup_method(self):
        data = _two_clusters()
        self.fit = data.subset(np.arange(30))
        self.val = data.subset(np.arange(30, 40))
        self.params = FitnessParams(4)

    def test_separating_feature(self):
        for mask in ([1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 1]):
            mask = np.array(mask, bool)
            fit, acc = evaluate_mask(mask, self.fit, self.val, KnnConfig(3), self.params)
            assert acc == 1.0
            assert fit == pytest.approx(0.98 + 0.02 * (4 - mask.sum()) / 4)

    def test_constant_feature_gives_prior(self):
        # every distance ties, so the 5 lowest training rows vote for all queries
        mask = np.array([0, 0, 0, 1], bool)
        _, acc = evaluate_mask(mask, self.fit, self.val, KnnConfig(5), self.params)
        fit_y = list(self.fit.labels)
        label = brute_force_knn([[0.0]] * 30, fit_y, [0.0], 5)
        assert acc == np.mean(self.val.labels == label)

    def test_fewer_features_win_at_equal_accuracy(self):
        a = evaluate_mask(np.array([1, 0, 0, 0], bool), self.fit, self.val, KnnConfig(3), self.params)
        b = evaluate_mask(np.array([1, 0, 1, 0], bool), self.fit, self.val, KnnConfig(3), self.params)
        assert a[1] == b[1] and a[0] > b[0]

    def test_empty_mask(self):
        with pytest.raises(ValueError):
            evaluate_mask(np.zeros(4, bool), self.fit, self.val, KnnConfig(3), self.params)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([1, 3, 5]))
    def test_matches_oracle(self, seed, k):
        rng = np.random.default_rng(seed)
        n, dim = 60, 4
        x = np.round(rng.random((n, dim)), 1)
        y = rng.choice(["p", "q", "r"], n)
        data = make_dataset(x, y)
        mask = rng.random(dim) < 0.6
        mask[rng.integers(dim)] = True
        fit, val = data.subset(np.arange(45)), data.subset(np.arange(45, n))
        got_fit, got_acc = evaluate_mask(mask, fit, val, KnnConfig(k), FitnessParams(dim))
        tx = x[:45][:, mask].tolist()
        hits = [brute_force_knn(tx, list(y[:45]), q, k) == t for q, t in zip(x[45:][:, mask].tolist(), y[45:])]
        assert got_acc == pytest.approx(np.mean(hits))
        assert got_fit == pytest.approx(0.98 * np.mean(hits) + 0.02 * (dim - mask.sum()) / dim)

    def test_pooled_folds_and_cache(self):
        data = _two_clusters()
        splits = [(np.arange(20, 40), np.arange(20)), (np.arange(20), np.arange(20, 40))]
        ev = Evaluator(data, splits, KnnConfig(3))
        mask = np.array([0, 1, 1, 0], bool)
        first = ev(mask)
        per_fold = [
            evaluate_mask(mask, data.subset(f), data.subset(v), KnnConfig(3), FitnessParams(4))[1]
            for f, v in splits
        ]
        assert first[1] == pytest.approx(np.mean(per_fold))
        assert ev(mask) == first
        assert ev.calls == 1


class TestRepair:
    def test_identity(self):
        rng = TapeRng([])
        np.testing.assert_array_equal(repair_mask(np.array([1, 0, 1], bool), rng), [1, 0, 1])

    def test_empty(self):
        out = repair_mask(np.zeros(3, bool), TapeRng([0.5]))
        np.testing.assert_array_equal(out, [0, 1, 0])

    def test_single_dimension(self):
        np.testing.assert_array_equal(repair_mask(np.zeros(1, bool), TapeRng([0.99])), [1])

    @given(st.integers(1, 30), st.integers(0, 2**32))
    def test_exactly_one_bit(self, dim, seed):
        assert repair_mask(np.zeros(dim, bool), RngStream(seed)).sum() == 1


class TestInitSwarm:
    def test_deterministic(self):
        a = init_swarm(20, 512, RngStream(1))
        b = init_swarm(20, 512, RngStream(1))
        for x, y in zip(a.agents, b.agents):
            np.testing.assert_array_equal(x.velocity, y.velocity)
            np.testing.assert_array_equal(x.mask, y.mask)

    def test_postconditions(self):
        state = init_swarm(20, 6, RngStream(3))
        assert state.n_agents == 20 and state.dim == 6 and state.t == 0
        for agent in state.agents:
            assert agent.mask.any()
            assert np.all((agent.velocity >= 0) & (agent.velocity <= 1))
            np.testing.assert_array_equal(agent.pbest_mask, agent.mask)

    def test_too_small(self):
        with pytest.raises(ValueError):
            init_swarm(1, 4, RngStream(0))

    def test_gbest_is_max_pbest(self):
        state = init_swarm(8, 5, RngStream(9))
        # count of unselected features as a stand-in fitness
        evaluate_swarm(state, lambda m: (float(5 - m.sum()), 0.0))
        assert state.gbest_fitness == max(a.pbest_fitness for a in state.agents)
        assert state.gbest_fitness == 5 - state.gbest_mask.sum()
