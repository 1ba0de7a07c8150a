import math

import numpy as np
import pytest

from foodchain.environment import (RngState, derive_seed, generator_matrix, sample_jump,
                                   stationary_distribution)


class TestStationaryDistribution:

    def test_symmetric_pair(self):
        np.testing.assert_allclose(stationary_distribution([[0, 1], [1, 0]]), [0.5, 0.5])

    def test_asymmetric_pair(self):
        # nu_0 * 2 = nu_1 * 1
        np.testing.assert_allclose(stationary_distribution([[0, 2], [1, 0]]), [1 / 3, 2 / 3],
                                   rtol=1e-14)

    def test_single_environment(self):
        np.testing.assert_array_equal(stationary_distribution([[0.0]]), [1.0])

    def test_balance_on_random_chains(self, gen):
        for N in (3, 5, 8):
            b = np.exp(gen.uniform(-3, 3, size=(N, N)))
            np.fill_diagonal(b, 0.0)
            nu = stationary_distribution(b)
            assert math.isclose(nu.sum(), 1.0, rel_tol=1e-14)
            assert np.all(nu > 0)
            np.testing.assert_allclose(nu @ generator_matrix(b), 0.0, atol=1e-12 * b.max())

    @pytest.mark.parametrize('factor', [0.1, 3.0, 50.0])
    def test_invariant_under_rescaled_rates(self, gen, factor):
        for N in (2, 4, 7):
            b = np.exp(gen.uniform(-2, 2, size=(N, N)))
            np.fill_diagonal(b, 0.0)
            np.testing.assert_allclose(stationary_distribution(factor * b), stationary_distribution(b),
                                       rtol=1e-12)

    def test_diagonal_entries_are_ignored(self):
        b = np.array([[5.0, 1.0], [3.0, 7.0]])
        np.testing.assert_allclose(generator_matrix(b), [[-1.0, 1.0], [3.0, -3.0]])


class TestRngState:

    def test_same_seed_same_stream(self):
        first, second = RngState(7), RngState(7)
        assert [first.uniform() for _ in range(5)] == [second.uniform() for _ in range(5)]
        assert first.draws == 5

    def test_different_seeds_differ(self):
        assert RngState(7).uniform() != RngState(8).uniform()

    def test_derived_seeds(self):
        assert derive_seed(1, 0) == derive_seed(1, 0)
        assert len({derive_seed(1, i) for i in range(100)}) == 100
        assert derive_seed(1, 0) != derive_seed(2, 0)


class TestSampleJump:

    def test_single_environment_never_jumps(self):
        holding, nxt = sample_jump(RngState(1), 0, np.array([[0.0]]))
        assert holding == math.inf
        assert nxt == 0

    def test_two_environments_alternate(self):
        rng = RngState(3)
        b = np.array([[0.0, 2.0], [1.0, 0.0]])
        assert all(sample_jump(rng, 0, b)[1] == 1 for _ in range(50))
        assert all(sample_jump(rng, 1, b)[1] == 0 for _ in range(50))
        assert rng.draws == 200

    def test_mean_holding_time(self):
        rng = RngState(11)
        b = np.array([[0.0, 2.0], [1.0, 0.0]])
        holdings = [sample_jump(rng, 0, b)[0] for _ in range(20000)]
        assert np.mean(holdings) == pytest.approx(0.5, rel=0.03)
        assert min(holdings) > 0

    def test_destination_frequencies(self):
        rng = RngState(5)
        b = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        targets = [sample_jump(rng, 0, b)[1] for _ in range(20000)]
        assert 0 not in targets
        assert targets.count(2) / len(targets) == pytest.approx(0.75, abs=0.02)
