import json
import math

import numpy as np

from foodchain import __version__
from foodchain.config import Config
from foodchain.environment import RNG_ALGORITHM
from foodchain.reports import RunManifest, dumps, write_report
from foodchain.tz_utils import format_utc, now_utc


def test_dumps_is_canonical():
    text = dumps({'b': np.float64(0.1), 'a': np.arange(3), 'c': math.inf})
    assert text.endswith('\n')
    assert list(json.loads(text)) == ['a', 'b', 'c']
    assert json.loads(text) == {'a': [0, 1, 2], 'b': 0.1, 'c': None}


def test_manifest_defaults():
    manifest = RunManifest(command='analyze', flags={'config': 'x.json'}, seed=3)
    assert manifest.version == __version__
    assert manifest.rng_algorithm == RNG_ALGORITHM
    assert manifest.finished_at is None
    assert manifest.finish().finished_at.endswith('Z')


def test_write_report_embeds_the_manifest(tmp_path):
    manifest = RunManifest(command='analyze', flags={}).finish()
    path = write_report(tmp_path / 'out', 'analyze', {'k_star': 2}, manifest)
    data = json.loads(open(path).read())
    assert data['k_star'] == 2
    assert data['manifest']['command'] == 'analyze'


def test_format_utc():
    assert format_utc(None) is None
    assert format_utc(now_utc()).endswith('Z')


def test_config_reload(monkeypatch):
    monkeypatch.setenv('FOODCHAIN_SEED', '77')
    monkeypatch.setenv('FOODCHAIN_DT_MAX', '0.5')
    try:
        Config.reload()
        assert Config.SEED == 77
        assert Config.DT_MAX == 0.5
    finally:
        monkeypatch.undo()
        Config.reload()
