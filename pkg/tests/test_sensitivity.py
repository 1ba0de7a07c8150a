import numpy as np
import pytest

from foodchain.environment import stationary_distribution
from foodchain.equilibria import delta_series
from foodchain.errors import DomainError, EpsilonTooLarge
from foodchain.models import CoefficientTable, ModelSpec, average_table
from foodchain.random_models import random_model, random_table
from foodchain.sensitivity import (EXISTENCE_CAVEAT, _shifted, perturbation_bounds,
                                   sign_stability_radius, validity_cap)

from .conftest import single_env_model


class TestPerturbationBounds:

    def test_desk_bounds(self, persistent_model):
        bounds = perturbation_bounds(persistent_model, 0.1, 1)
        assert bounds.q_k == pytest.approx(2.0)
        assert bounds.f_upper == pytest.approx(2.1 / 0.9)
        assert bounds.f_lower == pytest.approx(1.9 / 1.1)
        assert bounds.rate == pytest.approx(1.0)
        assert bounds.g_lower < 1.0 < bounds.g_upper
        assert bounds.sign_definite
        assert bounds.sandwich_checked
        assert bounds.to_dict()['caveat'] == EXISTENCE_CAVEAT

    def test_zero_epsilon_collapses(self, persistent_model):
        bounds = perturbation_bounds(persistent_model, 0.0, 1)
        assert bounds.f_lower == bounds.f_upper == pytest.approx(bounds.q_k)
        assert bounds.g_lower == pytest.approx(bounds.g_upper)

    def test_full_chain_has_no_rate(self, persistent_model):
        bounds = perturbation_bounds(persistent_model, 0.05, 2)
        assert bounds.rate is None
        assert bounds.rate_interval is None
        assert bounds.f_lower <= 0.5 <= bounds.f_upper

    def test_epsilon_too_large(self, persistent_model):
        # a_20 = 1 would reach 0
        with pytest.raises(EpsilonTooLarge) as exc:
            perturbation_bounds(persistent_model, 1.0, 1)
        assert exc.value.exit_code == 2

    @pytest.mark.parametrize('epsilon, k', [(0.1, 0), (0.1, 3), (-0.1, 1)])
    def test_domain(self, persistent_model, epsilon, k):
        with pytest.raises(DomainError):
            perturbation_bounds(persistent_model, epsilon, k)

    def test_sandwich_on_random_tables(self, gen):
        checked = 0
        for n in (2, 3, 4):
            for _ in range(4):
                model = ModelSpec(envs=(random_table(gen, n),), b=[[0.0]])
                for k in range(1, n + 1):
                    for eps in (0.001, 0.01, 0.05):
                        try:
                            bounds = perturbation_bounds(model, eps, k)
                        except EpsilonTooLarge:
                            continue
                        if bounds.sandwich_checked:
                            assert bounds.f_lower <= bounds.q_k * (1 + 1e-12) + 1e-12
                            assert bounds.q_k <= bounds.f_upper * (1 + 1e-12) + 1e-12
                            checked += 1
        assert checked > 0

def _positive_prefix(table, k):
    return bool(np.all(delta_series(table)[0][:k] > 0))


class TestBoundsOnRandomModels:
    EPSILONS = (0.2, 0.1, 0.05, 0.01)

    @pytest.fixture
    def cases(self, gen):
        """(model, k, averaged table) for 50 two-environment models with a positive q*k"""
        found = []
        for index in range(50):
            model = random_model(gen, 2 + index % 4, N=2)
            table = average_table(model, stationary_distribution(model.b))
            for k in range(1, model.n + 1):
                if _positive_prefix(table, k):
                    found.append((model, k, table))
        assert len(found) >= 50
        return found

    def test_sandwich_and_nesting(self, cases):
        nested = 0
        for model, k, table in cases:
            chain = []
            for eps in self.EPSILONS:
                try:
                    bounds = perturbation_bounds(model, eps, k)
                except EpsilonTooLarge:
                    continue
                slack = 1e-12 * max(1.0, abs(bounds.q_k))
                assert bounds.sandwich_checked
                assert bounds.f_lower - slack <= bounds.q_k <= bounds.f_upper + slack
                if all(_positive_prefix(_shifted(table, eps, sign, k), k) for sign in (-1, 1)):
                    chain.append(bounds)
            for wide, narrow in zip(chain, chain[1:]):
                slack = 1e-12 * max(1.0, abs(wide.q_k))
                assert wide.f_lower <= narrow.f_lower + slack
                assert narrow.f_upper <= wide.f_upper + slack
                nested += 1
        assert nested > 0

    def test_bounds_shrink_linearly_to_the_equilibrium(self, cases):
        # f(e) - f(-e) is odd in e, so the width is 2 e f'(0) up to O(e^3)
        short = [(model, k) for model, k, _ in cases if k <= 2]
        for model, k in short[:30]:
            coarse = perturbation_bounds(model, 1e-4, k)
            fine = perturbation_bounds(model, 1e-5, k)
            width = coarse.f_upper - coarse.f_lower
            assert width > 0
            assert fine.f_upper - fine.f_lower == pytest.approx(0.1 * width, rel=1e-3)
            slack = 1e-12 * max(1.0, abs(fine.q_k))
            assert fine.f_lower - slack <= fine.q_k <= fine.f_upper + slack


class TestValidityCap:

    def test_desk_cap(self):
        table = CoefficientTable.uniform(2, a0=[2.0, 1.0])
        assert validity_cap(table, 1) == 1.0

    def test_single_species_cap(self):
        table = CoefficientTable.uniform(1, value=0.5, a0=[3.0])
        assert validity_cap(table, 1) == 0.5


class TestSignStabilityRadius:

    def test_desk_radius(self, persistent_model):
        radius = sign_stability_radius(persistent_model, 1)
        assert radius.rate == pytest.approx(1.0)
        assert radius.radius == pytest.approx(0.2, abs=1e-5)
        assert not radius.degenerate

    @pytest.mark.parametrize('a10, expected', [(2.5, 1.5 / 5.5), (3.0, 1.0 / 3.0), (5.0, 0.5)])
    def test_radius_family(self, a10, expected):
        # g_{2}(-e) > 0  <=>  e < (a10 - 1) / (a10 + 3)
        radius = sign_stability_radius(single_env_model([a10, 1.0]), 1)
        assert radius.radius == pytest.approx(expected, abs=1e-5)
        assert radius.radius < radius.cap

    def test_negative_rate(self, extinct_model):
        radius = sign_stability_radius(extinct_model, 1)
        assert radius.rate == pytest.approx(-0.25)
        assert 0.0 < radius.radius < radius.cap
        bounds = perturbation_bounds(extinct_model, radius.radius * 0.99, 1)
        assert bounds.g_upper < 0

    def test_degenerate_rate(self, degenerate_model):
        radius = sign_stability_radius(degenerate_model, 1)
        assert radius.radius == 0.0
        assert radius.degenerate
        assert radius.to_dict()['degenerate'] is True

    def test_needs_a_prefix(self, persistent_model):
        with pytest.raises(DomainError):
            sign_stability_radius(persistent_model, 0)
