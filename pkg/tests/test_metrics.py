import numpy as np
import pytest

from sarweights.errors import DimensionMismatchError, EmptyChainError, TooFewDrawsError
from sarweights.metrics import (
    accuracy,
    accuracy_from_counts,
    avg_neighbours,
    geweke_z,
    inclusion_matrix,
    rmse,
)
from sarweights.sampler import ChainOutput


def _chain(counts, draws, n=None):
    counts = np.asarray(counts)
    n = n or counts.shape[0]
    return ChainOutput(
        beta_draws=np.zeros((draws, 1)),
        sigma2_draws=np.ones(draws),
        rho_draws=np.full(draws, 0.5),
        inclusion_counts=counts,
        omega_last=np.zeros((n, n), dtype=int),
        draw_count=draws,
    )


class TestAccuracy:
    def test_perfect_match(self):
        truth = np.array([[0, 1], [1, 0]])
        draws = np.repeat(truth[None], 5, axis=0)
        mask = ~np.eye(2, dtype=bool)
        assert accuracy(draws, truth, mask) == 1.0

    def test_one_pair_off(self):
        # N=5 symmetric: every draw differs from truth in exactly one pair
        n = 5
        truth = np.zeros((n, n), dtype=int)
        truth[0, 1] = truth[1, 0] = 1
        draw = truth.copy()
        draw[0, 1] = draw[1, 0] = 0  # one pair wrong = 2 of 20 entries
        draws = np.repeat(draw[None], 7, axis=0)
        mask = ~np.eye(n, dtype=bool)
        assert accuracy(draws, truth, mask) == pytest.approx(0.9)

    def test_single_draw_equals_entry_count(self):
        rng = np.random.default_rng(0)
        n = 6
        truth = (rng.random((n, n)) < 0.5).astype(int)
        np.fill_diagonal(truth, 0)
        draw = (rng.random((n, n)) < 0.5).astype(int)
        np.fill_diagonal(draw, 0)
        mask = ~np.eye(n, dtype=bool)
        direct = (draw[mask] == truth[mask]).mean()
        assert accuracy(draw[None], truth, mask) == pytest.approx(direct)

    def test_counts_equivalence(self):
        rng = np.random.default_rng(1)
        n, d = 5, 40
        truth = (rng.random((n, n)) < 0.4).astype(int)
        np.fill_diagonal(truth, 0)
        draws = (rng.random((d, n, n)) < 0.5).astype(int)
        for k in range(d):
            np.fill_diagonal(draws[k], 0)
        mask = ~np.eye(n, dtype=bool)
        counts = draws.sum(axis=0)
        assert accuracy_from_counts(counts, d, truth, mask) == pytest.approx(
            accuracy(draws, truth, mask), abs=1e-12
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            accuracy(np.zeros((2, 3, 3)), np.zeros((4, 4)), np.ones((4, 4), bool))


class TestRmse:
    def test_exact_estimate(self):
        assert rmse(np.array([1.0, -2.0]), np.array([1.0, -2.0])) == 0.0

    def test_scalar(self):
        assert rmse(0.5, 0.8) == pytest.approx(0.3)

    def test_replication_averaging(self):
        # two replications with RMSE 0.1 and 0.3 average to 0.2
        assert rmse(np.array([0.7, 1.1]), 0.8) == pytest.approx(0.2)

    def test_vector_replications(self):
        est = np.array([[1.0, 1.0], [0.0, 0.0]])
        truth = np.array([0.0, 0.0])
        assert rmse(est, truth) == pytest.approx(0.5)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            rmse(np.zeros((2, 3)), np.zeros(2))


class TestInclusion:
    def test_inclusion_and_avg_neighbours(self):
        n, d = 4, 10
        counts = np.zeros((n, n), dtype=int)
        # every draw had the same omega with 3 neighbours per row
        for i in range(n):
            for j in range(n):
                if i != j and (j - i) % n <= 3:
                    counts[i, j] = d
        counts[np.arange(n), np.arange(n)] = 0
        chain = _chain(counts, d)
        inc = inclusion_matrix(chain)
        assert inc.max() <= 1.0
        assert avg_neighbours(inc) == pytest.approx(3.0)

    def test_empty_chain(self):
        with pytest.raises(EmptyChainError):
            inclusion_matrix(_chain(np.zeros((3, 3), dtype=int), 0))

    def test_hard_excluded_entries_zero(self):
        counts = np.zeros((3, 3), dtype=int)
        counts[0, 1] = 10
        inc = inclusion_matrix(_chain(counts, 10))
        assert inc[1, 0] == 0.0
        assert inc[0, 1] == 1.0


class TestGeweke:
    def test_identical_segment_means(self):
        x = np.tile([1.0, 2.0], 50)  # first and last segments share the mean
        assert geweke_z(x) == pytest.approx(0.0, abs=1e-12)

    def test_iid_chain_small_score(self):
        rng = np.random.default_rng(2)
        scores = [geweke_z(rng.standard_normal(10_000)) for _ in range(50)]
        assert np.mean(np.abs(scores) < 3.0) >= 0.98

    def test_trending_chain_flagged(self):
        z = geweke_z(np.linspace(0.0, 1.0, 10_000))
        assert abs(z) > 3.0

    def test_too_few_draws(self):
        with pytest.raises(TooFewDrawsError):
            geweke_z(np.zeros(19))
