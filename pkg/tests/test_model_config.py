import hashlib
import json

import numpy as np
import pytest

from foodchain.errors import (ConfigParseError, DimensionMismatch, ModeMismatch, NonPositiveRate,
                              ReducibleSwitching)
from foodchain.model_config import config_digest, model_from_dict, parse_config, write_config
from foodchain.models import Mode


def desk_dict(**overrides):
    data = {
        'n': 2,
        'shared': {'a_diag': [1, 1], 'a_lower': [1], 'a_upper': [1]},
        'environments': [{'a0': [3, 1]}, {'a0': [1, 1]}],
        'switching': [[0, 1], [1, 0]],
    }
    data.update(overrides)
    return data


class TestShippedConfigs:

    @pytest.mark.parametrize('name, a10', [('persistent_desk', [3.0, 1.0]),
                                           ('extinct_desk', [1.0, 0.5]),
                                           ('degenerate_desk', [1.5, 0.5])])
    def test_desk_files(self, config_dir, name, a10):
        model = parse_config(config_dir / f'{name}.json')
        assert model.n == 2 and model.N == 2
        assert model.mode is Mode.STRICT
        assert [t.a0[0] for t in model.envs] == a10

    def test_perturbed_file(self, config_dir):
        model = parse_config(config_dir / 'perturbed_three_species.json')
        assert model.mode is Mode.PERTURBED
        np.testing.assert_array_equal(model.envs[1].a_lower, [1.5, 0.8])
        np.testing.assert_array_equal(model.envs[0].a_lower, [1.0, 1.0])


class TestModelFromDict:

    def test_strict_by_default(self):
        model = model_from_dict(desk_dict())
        assert model.mode is Mode.STRICT
        np.testing.assert_array_equal(model.envs[0].a0, [3.0, 1.0])

    def test_environment_interactions_imply_perturbed(self):
        data = desk_dict(environments=[{'a0': [3, 1]}, {'a0': [1, 1], 'a_upper': [2]}])
        assert model_from_dict(data).mode is Mode.PERTURBED

    def test_explicit_strict_mode_is_checked(self):
        data = desk_dict(mode='strict', environments=[{'a0': [3, 1]}, {'a0': [1, 1], 'a_upper': [2]}])
        with pytest.raises(ModeMismatch):
            model_from_dict(data)

    def test_unknown_keys(self):
        with pytest.raises(ConfigParseError) as exc:
            model_from_dict(desk_dict(colour='blue'))
        assert exc.value.context['keys'] == ['colour']
        with pytest.raises(ConfigParseError):
            model_from_dict(desk_dict(environments=[{'a0': [3, 1], 'b0': 1}, {'a0': [1, 1]}]))

    @pytest.mark.parametrize('key', ['n', 'environments', 'switching'])
    def test_missing_keys(self, key):
        data = desk_dict()
        del data[key]
        with pytest.raises(ConfigParseError) as exc:
            model_from_dict(data)
        assert exc.value.context['field'] == key

    def test_missing_shared_value(self):
        data = desk_dict(shared={'a_diag': [1, 1], 'a_lower': [1]})
        with pytest.raises(ConfigParseError) as exc:
            model_from_dict(data)
        assert exc.value.context['field'] == 'environments[0].a_upper'

    def test_bad_n(self):
        for n in (0, 2.5, True, '2'):
            with pytest.raises(ConfigParseError):
                model_from_dict(desk_dict(n=n))

    def test_dimension_errors_name_the_field(self):
        data = desk_dict(environments=[{'a0': [3, 1]}, {'a0': [1, 1], 'a_lower': [1, 1]}])
        with pytest.raises(DimensionMismatch) as exc:
            model_from_dict(data)
        assert exc.value.context['field'] == 'environments[1].a_lower'

    def test_species_count_must_match_n(self):
        with pytest.raises(DimensionMismatch):
            model_from_dict(desk_dict(n=3))

    def test_validation_errors_pass_through(self):
        with pytest.raises(NonPositiveRate):
            model_from_dict(desk_dict(environments=[{'a0': [3, 1]}, {'a0': [1, -1]}]))
        with pytest.raises(ReducibleSwitching):
            model_from_dict(desk_dict(switching=[[0, 0], [1, 0]]))

    @pytest.mark.parametrize('overrides, field', [
        ({'shared': {'a_diag': [1, 1], 'a_lower': [1], 'a_upper': [float('inf')]}},
         'environments[0].a_upper[0]'),
        ({'shared': {'a_diag': [1, float('inf')], 'a_lower': [1], 'a_upper': [1]}},
         'environments[0].a_diag[1]'),
        ({'environments': [{'a0': [3, 1]}, {'a0': [float('inf'), 1]}]},
         'environments[1].a0[0]'),
        ({'environments': [{'a0': [3, float('nan')]}, {'a0': [1, 1]}]},
         'environments[0].a0[1]'),
    ])
    def test_coefficients_must_be_finite(self, overrides, field):
        with pytest.raises(NonPositiveRate) as exc:
            model_from_dict(desk_dict(**overrides))
        assert exc.value.context['field'] == field
        assert exc.value.exit_code == 2


class TestFiles:

    def test_json_syntax_error_has_position(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{\n  "n": 2,\n  "shared": [\n}\n')
        with pytest.raises(ConfigParseError) as exc:
            parse_config(path)
        assert exc.value.context['line'] == 4
        assert 'column' in exc.value.context

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError):
            parse_config(tmp_path / 'nope.json')

    def test_write_then_parse(self, tmp_path, persistent_model):
        path = write_config(persistent_model, tmp_path / 'model.json')
        again = parse_config(path)
        assert again.fingerprint() == persistent_model.fingerprint()

    def test_infinity_literal_is_rejected(self, tmp_path):
        # json.dumps spells inf as the bare token Infinity, which json.loads accepts
        path = tmp_path / 'model.json'
        path.write_text(json.dumps(desk_dict(environments=[{'a0': [float('inf'), 1]}, {'a0': [1, 1]}])))
        assert 'Infinity' in path.read_text()
        with pytest.raises(NonPositiveRate) as exc:
            parse_config(path)
        assert exc.value.context['field'] == 'environments[0].a0[0]'

    def test_digest(self, tmp_path):
        path = tmp_path / 'model.json'
        path.write_text(json.dumps(desk_dict()))
        assert config_digest(path) == hashlib.sha256(path.read_bytes()).hexdigest()
