"""
JSON model files.

    {
      "n": 2,
      "shared": {"a_diag": [1, 1], "a_lower": [1], "a_upper": [1]},
      "environments": [{"a0": [3, 1]}, {"a0": [1, 1]}],
      "switching": [[0, 1], [1, 0]]
    }

An environment that carries any of a_diag/a_lower/a_upper itself makes the
model perturbed; missing entries fall back to `shared`. Arrays are 0-based.
"""
import hashlib
import json
import logging
import os

from .errors import ConfigParseError, DimensionMismatch
from .models import CoefficientTable, Mode, ModelSpec, validate_model

logger = logging.getLogger(__name__)

TOP_KEYS = {'n', 'mode', 'shared', 'environments', 'switching', 'description'}
SHARED_KEYS = {'a_diag', 'a_lower', 'a_upper'}
ENV_KEYS = {'a0'} | SHARED_KEYS


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigParseError(f"{where} must be an object", field=where)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigParseError(f"unknown key(s) in {where}: {', '.join(unknown)}",
                               field=where, keys=unknown)


def model_from_dict(data) -> ModelSpec:
    """Build and validate a ModelSpec from the decoded JSON document"""
    _reject_unknown(data, TOP_KEYS, 'model')
    for key in ('n', 'environments', 'switching'):
        if key not in data:
            raise ConfigParseError(f"missing required key '{key}'", field=key)

    n = data['n']
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigParseError(f"n must be a positive integer, got {n!r}", field='n')

    shared = data.get('shared', {})
    _reject_unknown(shared, SHARED_KEYS, 'shared')

    envs = data['environments']
    if not isinstance(envs, list) or not envs:
        raise ConfigParseError("environments must be a non-empty array", field='environments')

    perturbed = False
    tables = []
    for j, env in enumerate(envs):
        where = f'environments[{j}]'
        _reject_unknown(env, ENV_KEYS, where)
        if 'a0' not in env:
            raise ConfigParseError(f"{where} is missing a0", field=f'{where}.a0')
        if SHARED_KEYS & set(env):
            perturbed = True
        values = {}
        for key in ENV_KEYS:
            source = env if key in env else shared
            if key not in source:
                raise ConfigParseError(f"{where}.{key} given neither in the environment nor in shared",
                                       field=f'{where}.{key}')
            values[key] = source[key]
        try:
            table = CoefficientTable(**values)
        except (TypeError, ValueError) as e:
            raise ConfigParseError(f"{where}: {e}", field=where) from e
        except DimensionMismatch as e:
            name = f"{where}.{e.context['field']}" if 'field' in e.context else where
            raise DimensionMismatch(f"{name}: {e}", field=name) from e
        if table.n != n:
            raise DimensionMismatch(f"{where} has {table.n} species but n = {n}", field=f'{where}.a0')
        tables.append(table)

    mode = data.get('mode', Mode.PERTURBED.value if perturbed else Mode.STRICT.value)
    if mode not in {m.value for m in Mode}:
        raise ConfigParseError(f"mode must be 'strict' or 'perturbed', got {mode!r}", field='mode')
    try:
        model = ModelSpec(envs=tuple(tables), b=data['switching'], mode=Mode(mode))
    except (TypeError, ValueError) as e:
        raise ConfigParseError(f"switching: {e}", field='switching') from e
    return validate_model(model)


def parse_config(path) -> ModelSpec:
    """Read, decode and validate a model file; JSON syntax errors report line and column"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigParseError(f"cannot read {path}: {e.strerror}", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}",
                               path=str(path), line=e.lineno, column=e.colno) from e
    model = model_from_dict(data)
    logger.info(f"Loaded {model!r} from {os.path.basename(str(path))}")
    return model


def config_digest(path):
    """sha256 of the raw file bytes"""
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        h.update(f.read())
    return h.hexdigest()


def write_config(model: ModelSpec, path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(model.to_dict(), f, indent=2, sort_keys=True)
        f.write('\n')
    return path
