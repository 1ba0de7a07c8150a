import math

import numpy as np
import pytest

from foodchain.errors import AssumptionViolated
from foodchain.hormander import (MAX_CACHED_SYSTEMS, NUMERIC_RTOL, _cached_system, bracket_system,
                                 closed_form_leading, hormander_brackets, hormander_check,
                                 numeric_brackets)
from foodchain.models import CoefficientTable, Mode, ModelSpec, validate_model
from foodchain.random_models import generator, random_model

from .conftest import two_env_model


@pytest.fixture
def top_model():
    first = CoefficientTable.uniform(2, a0=[2.0, 1.0])
    return validate_model(ModelSpec(envs=(first, first.with_a0([2.0, 3.0])), b=[[0, 1], [1, 0]]))


class TestBottomBrackets:

    def test_desk_matrix(self, persistent_model):
        bm = hormander_brackets(persistent_model, [1.0, 0.5])
        # b^1 = (2 x1, 0); b^2 = (-2 x1^2, 2 x1 x2)
        np.testing.assert_allclose(bm.matrix, [[2.0, -2.0], [0.0, 1.0]], atol=1e-12)
        np.testing.assert_allclose(bm.leading, [2.0, 1.0])
        assert bm.pair == (0, 1)
        assert bm.leading_rows() == [0, 1]
        assert np.all(bm.column_errors < 1e-6)

    def test_closed_form_leading_entries(self, persistent_model):
        x = np.array([1.5, 0.25])
        lead = closed_form_leading(persistent_model, (0, 1), x)
        # (G_1^0 - G_1^1) = 2 x1, times a_21 x2
        np.testing.assert_allclose(lead, [3.0, 0.75])

    def test_three_species_matrix_is_upper_triangular(self, gen):
        model = random_model(gen, 3)
        for _ in range(2):
            x = gen.uniform(0.5, 2.0, size=3)
            bm = hormander_brackets(model, x, verify=True)
            np.testing.assert_array_equal(np.tril(bm.matrix, -1), 0.0)
            assert np.all(bm.column_errors < 1e-6)

    def test_systems_are_cached(self, persistent_model):
        assert bracket_system(persistent_model, (0, 1)) is bracket_system(persistent_model, (0, 1))

    def test_equal_models_share_a_system(self, persistent_model):
        twin = two_env_model((3.0, 1.0))
        assert twin is not persistent_model
        assert bracket_system(twin, (0, 1)) is bracket_system(persistent_model, (0, 1))

    def test_cache_is_bounded(self):
        _cached_system.cache_clear()
        gen = generator(77)
        models = [random_model(gen, 2) for _ in range(MAX_CACHED_SYSTEMS + 8)]
        for model in models:
            bracket_system(model, (0, 1))
            assert _cached_system.cache_info().currsize <= MAX_CACHED_SYSTEMS
        assert _cached_system.cache_info().currsize == MAX_CACHED_SYSTEMS
        last = models[-1]
        assert bracket_system(last, (0, 1)) is bracket_system(last, (0, 1))

    @pytest.mark.parametrize('n', [2, 3])
    def test_columns_agree_with_finite_differences(self, gen, n):
        for _ in range(5):
            model = random_model(gen, n)
            system = bracket_system(model, (0, 1))
            for _ in range(5):
                x = gen.uniform(0.2, 2.0, size=n)
                analytic = system.matrix(x)
                numeric = numeric_brackets(model, system, x)
                for k in range(n):
                    scale = max(1e-300, float(np.max(np.abs(analytic[:, k]))))
                    assert np.max(np.abs(analytic[:, k] - numeric[:, k])) <= NUMERIC_RTOL * scale


class TestTopBrackets:

    def test_top_matrix(self, top_model):
        bm = hormander_brackets(top_model, [1.0, 1.0], variant='top')
        # b^1 = (0, 2 x2); b^2 leads in row 1 with -2 x1 x2
        np.testing.assert_allclose(bm.matrix[:, 0], [0.0, 2.0], atol=1e-12)
        assert bm.matrix[0, 1] == pytest.approx(-2.0)
        assert bm.leading_rows() == [1, 0]

    def test_top_condition_holds(self, top_model):
        result = hormander_check(top_model, [1.0, 1.0], variant='top')
        assert result.holds
        assert result.det == pytest.approx(4.0)


class TestPairSelection:

    def test_no_pair_raises(self, top_model):
        with pytest.raises(AssumptionViolated):
            hormander_brackets(top_model, [1.0, 1.0])

    def test_explicit_pair_must_be_admissible(self, top_model):
        with pytest.raises(AssumptionViolated):
            hormander_brackets(top_model, [1.0, 1.0], pair=(0, 1), variant='bottom')

    def test_identical_tables_give_zero_columns(self):
        table = CoefficientTable.uniform(2, a0=[2.0, 1.0])
        model = validate_model(ModelSpec(envs=(table, table), b=[[0, 1], [1, 0]]))
        bm = hormander_brackets(model, [1.0, 1.0], pair=(0, 1))
        np.testing.assert_array_equal(bm.matrix, 0.0)


class TestHormanderCheck:

    def test_holds_in_the_interior(self, persistent_model):
        result = hormander_check(persistent_model, [1.0, 0.5])
        assert result.holds
        assert result.det == pytest.approx(2.0)
        assert math.isfinite(result.condition)
        np.testing.assert_allclose(result.column_norms, [2.0, math.sqrt(5.0)])
        assert result.to_dict()['brackets']['pair'] == [0, 1]

    def test_fails_on_the_predator_face(self, persistent_model):
        result = hormander_check(persistent_model, [1.0, 0.0])
        assert not result.holds
        assert result.condition == math.inf
        assert result.to_dict()['condition'] is None
        assert result.reason

    def test_model_without_pair(self):
        gen = np.random.Generator(np.random.PCG64(3))
        model = random_model(gen, 2, mode=Mode.PERTURBED)
        result = hormander_check(model, [1.0, 1.0])
        assert not result.holds
        assert result.brackets is None
        np.testing.assert_array_equal(result.column_norms, [0.0, 0.0])
