"""
Seeded random tables and models for property checks.

Coefficients are log-uniform on [0.1, 10]; every draw goes through a numpy
Generator built from the given seed, so a failing case is reproduced by its
seed alone.
"""
import numpy as np

from .models import CoefficientTable, Mode, ModelSpec, validate_model

LOW, HIGH = 0.1, 10.0


def _log_uniform(gen, size):
    return np.exp(gen.uniform(np.log(LOW), np.log(HIGH), size=size))


def random_table(gen, n) -> CoefficientTable:
    return CoefficientTable(
        a0=_log_uniform(gen, n),
        a_diag=_log_uniform(gen, n),
        a_lower=_log_uniform(gen, n - 1),
        a_upper=_log_uniform(gen, n - 1),
    )


def random_model(gen, n, N=2, mode=Mode.STRICT) -> ModelSpec:
    """
    Strict models share every interaction; environment 0 and 1 then differ
    only in a_10, so a switching pair always exists. Perturbed models draw
    every table independently.
    """
    base = random_table(gen, n)
    if mode is Mode.STRICT:
        envs = [base]
        for j in range(1, N):
            a0 = base.a0.copy()
            if j == 1:
                a0[0] = _log_uniform(gen, 1)[0]
            else:
                a0 = _log_uniform(gen, n)
            envs.append(base.with_a0(a0))
    else:
        envs = [base] + [random_table(gen, n) for _ in range(1, N)]
    b = _log_uniform(gen, (N, N))
    np.fill_diagonal(b, 0.0)
    return validate_model(ModelSpec(envs=tuple(envs), b=b, mode=mode))


def generator(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
