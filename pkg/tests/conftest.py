"""
Shared fixtures: the two-species desk models and seeded random generators.
"""
from pathlib import Path

import pytest

from foodchain.models import CoefficientTable, ModelSpec, validate_model
from foodchain.random_models import generator

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


def two_env_model(a10, a20=1.0, b=((0.0, 1.0), (1.0, 0.0))):
    """Two environments sharing every interaction (all 1), differing in a_10 only"""
    first = CoefficientTable.uniform(2, a0=[a10[0], a20])
    second = first.with_a0([a10[1], a20])
    return validate_model(ModelSpec(envs=(first, second), b=b))


def single_env_model(a0, value=1.0):
    table = CoefficientTable.uniform(len(a0), value=value, a0=a0)
    return validate_model(ModelSpec(envs=(table,), b=[[0.0]]))


@pytest.fixture
def persistent_model():
    """nu = (1/2, 1/2), averaged a0 = (2, 1): q* = (1.5, 0.5)"""
    return two_env_model((3.0, 1.0))


@pytest.fixture
def extinct_model():
    """averaged a_10 = 0.75: species 2 dies at rate 0.25"""
    return two_env_model((1.0, 0.5))


@pytest.fixture
def degenerate_model():
    """averaged a_10 = 1 = a_20: delta(2) is exactly 0"""
    return two_env_model((1.5, 0.5))


@pytest.fixture
def favourable_model():
    """Environment 0 supports both species, environment 1 only the prey"""
    return two_env_model((3.0, 0.5))


@pytest.fixture
def gen():
    return generator(20240101)


@pytest.fixture
def config_dir():
    return CONFIG_DIR
