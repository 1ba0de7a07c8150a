import numpy as np
import pytest

from foodchain.errors import DimensionMismatch, PrefixNotPositive
from foodchain.invasion import env_favorability, invasion_rate_boundary, lambda_zero_check
from foodchain.occupation import OccupationMeasure
from foodchain.random_models import random_model

from .conftest import single_env_model


class TestBoundaryRates:

    def test_origin(self, persistent_model):
        rate = invasion_rate_boundary(persistent_model, 0)
        assert rate.rate == pytest.approx(2.0)
        assert rate.q.size == 0
        assert rate.invades

    def test_predator_invades(self, persistent_model):
        rate = invasion_rate_boundary(persistent_model, 1)
        assert rate.rate == pytest.approx(1.0)
        assert rate.via_delta == pytest.approx(1.0)
        np.testing.assert_allclose(rate.q, [2.0])
        assert rate.to_dict()['species'] == 2

    def test_predator_fails_to_invade(self, extinct_model):
        rate = invasion_rate_boundary(extinct_model, 1)
        assert rate.rate == pytest.approx(-0.25)
        assert not rate.invades

    def test_degenerate_rate_is_zero(self, degenerate_model):
        assert invasion_rate_boundary(degenerate_model, 1).rate == 0.0

    def test_prefix_must_be_positive(self):
        # delta(2) = 1 - 2 < 0
        model = single_env_model([1.0, 2.0, 1.0])
        with pytest.raises(PrefixNotPositive):
            invasion_rate_boundary(model, 2)

    def test_range(self, persistent_model):
        with pytest.raises(DimensionMismatch):
            invasion_rate_boundary(persistent_model, 2)

    def test_direct_formula_agrees_with_delta_ratio(self, gen):
        for _ in range(5):
            model = random_model(gen, 4)
            rate = invasion_rate_boundary(model, 0)
            assert rate.rate == pytest.approx(rate.via_delta)


class TestLambdaZero:

    def test_boundary_point_mass(self, persistent_model):
        # the prey-only equilibrium of the averaged chain sits at x1 = 2
        occ = OccupationMeasure.point_mass([2.0, 0.0], [0.5, 0.5])
        np.testing.assert_allclose(lambda_zero_check(occ, persistent_model, 1), [0.0], atol=1e-15)

    def test_range(self, persistent_model):
        occ = OccupationMeasure.point_mass([2.0, 0.0], [0.5, 0.5])
        with pytest.raises(DimensionMismatch):
            lambda_zero_check(occ, persistent_model, 3)


class TestFavourability:

    def test_prefixes_and_attractors(self, favourable_model):
        fav = env_favorability(favourable_model)
        assert fav.prefix == [2, 1]
        np.testing.assert_allclose(fav.attractors[0], [2.0, 1.0])
        np.testing.assert_allclose(fav.attractors[1], [0.5, 0.0])
        assert fav.averaged_prefix == 2

    def test_weighted_delta_identity(self, favourable_model):
        fav = env_favorability(favourable_model)
        assert [entry['k'] for entry in fav.identity] == [0, 1]
        assert fav.identity[0]['lambda'] == pytest.approx(1.75)
        assert fav.identity[1]['lambda'] == pytest.approx(0.75)
        assert fav.identity[1]['weighted_delta'] == pytest.approx(0.75)

    def test_identity_on_random_strict_models(self, gen):
        for n in (2, 3, 4):
            fav = env_favorability(random_model(gen, n, N=3))
            for entry in fav.identity:
                assert entry['lambda'] == pytest.approx(entry['weighted_delta'], rel=1e-9, abs=1e-9)

    def test_to_dict(self, favourable_model):
        data = env_favorability(favourable_model).to_dict()
        assert data['favourable_prefix'] == [2, 1]
        assert data['nu'] == [0.5, 0.5]
