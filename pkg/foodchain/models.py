"""
Switched Lotka-Volterra food chain: coefficient tables, the model spec,
vector fields and the compact invariant set.

Indices are 0-based in code and in config files; docstrings use the usual
1-based species numbering (species 1 is the basal prey).
"""
from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolated,
    DimensionMismatch,
    DomainError,
    ModeMismatch,
    NegativeState,
    NonPositiveRate,
    ReducibleSwitching,
)

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    STRICT = 'strict'        # only a0 may differ between environments
    PERTURBED = 'perturbed'  # every coefficient may differ


def _frozen(values, name, length):
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (length,):
        raise DimensionMismatch(f"{name} must have length {length}, got {arr.size}",
                                field=name, expected=length, got=int(arr.size))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """
    One environment's food-chain coefficients.

    a0[i]       growth rate of species 1 (i = 0), death rate otherwise
    a_diag[i]   intra-specific competition a_{ii}
    a_lower[i]  predation rate a_{i+2,i+1}: species i+1 eating species i
    a_upper[i]  hunted rate a_{i+1,i+2}: species i eaten by species i+1
    """
    a0: np.ndarray
    a_diag: np.ndarray
    a_lower: np.ndarray
    a_upper: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        a0 = np.array(self.a0, dtype=float).reshape(-1)
        n = a0.size
        if n < 1:
            raise DimensionMismatch("a coefficient table needs at least one species")
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'a0', _frozen(a0, 'a0', n))
        object.__setattr__(self, 'a_diag', _frozen(self.a_diag, 'a_diag', n))
        object.__setattr__(self, 'a_lower', _frozen(self.a_lower, 'a_lower', n - 1))
        object.__setattr__(self, 'a_upper', _frozen(self.a_upper, 'a_upper', n - 1))

    @classmethod
    def uniform(cls, n, value=1.0, a0=None):
        """Table with every interaction/diagonal entry equal to `value`"""
        return cls(
            a0=np.full(n, value) if a0 is None else a0,
            a_diag=np.full(n, value),
            a_lower=np.full(n - 1, value),
            a_upper=np.full(n - 1, value),
        )

    @property
    def signs(self):
        s = -np.ones(self.n)
        s[0] = 1.0
        return s

    def with_a0(self, a0):
        return CoefficientTable(a0, self.a_diag, self.a_lower, self.a_upper)

    def restrict(self, k):
        """Table of the first k species (the food chain with x_{k+1} = 0)"""
        if not 1 <= k <= self.n:
            raise DimensionMismatch(f"prefix {k} outside 1..{self.n}", k=k, n=self.n)
        return CoefficientTable(self.a0[:k], self.a_diag[:k],
                                self.a_lower[:k - 1], self.a_upper[:k - 1])

    def same_interactions(self, other, rtol=0.0):
        return (np.allclose(self.a_diag, other.a_diag, rtol=rtol, atol=0.0)
                and np.allclose(self.a_lower, other.a_lower, rtol=rtol, atol=0.0)
                and np.allclose(self.a_upper, other.a_upper, rtol=rtol, atol=0.0))

    def growth(self, x):
        """Per-capita rates F_i(x); x may be one state or an (m, n) stack"""
        x = np.asarray(x, dtype=float)
        F = self.signs * self.a0 - self.a_diag * x
        if self.n > 1:
            F[..., 1:] += self.a_lower * x[..., :-1]
            F[..., :-1] -= self.a_upper * x[..., 1:]
        return F

    def field(self, x):
        """G_i(x) = x_i F_i(x)"""
        x = np.asarray(x, dtype=float)
        return x * self.growth(x)

    def jacobian(self, x):
        """Tridiagonal Jacobian DG(x)"""
        x = np.asarray(x, dtype=float)
        J = np.diag(self.growth(x) - self.a_diag * x)
        if self.n > 1:
            idx = np.arange(self.n - 1)
            J[idx, idx + 1] = -self.a_upper * x[:-1]
            J[idx + 1, idx] = self.a_lower * x[1:]
        return J

    def to_dict(self):
        return {
            'a0': self.a0.tolist(),
            'a_diag': self.a_diag.tolist(),
            'a_lower': self.a_lower.tolist(),
            'a_upper': self.a_upper.tolist(),
        }

    def __repr__(self):
        return f'<CoefficientTable n={self.n} a0={self.a0.tolist()}>'


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """N food-chain environments switched by the rate matrix b"""
    envs: tuple
    b: np.ndarray
    mode: Mode = Mode.STRICT
    n: int = field(init=False)

    def __post_init__(self):
        envs = tuple(self.envs)
        if not envs:
            raise DimensionMismatch("a model needs at least one environment")
        object.__setattr__(self, 'envs', envs)
        object.__setattr__(self, 'n', envs[0].n)
        b = np.array(self.b, dtype=float)
        if b.shape != (len(envs), len(envs)):
            raise DimensionMismatch(
                f"switching matrix must be {len(envs)}x{len(envs)}, got {b.shape}",
                field='switching', got=list(b.shape))
        b.setflags(write=False)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'mode', Mode(self.mode))

    @property
    def N(self):
        return len(self.envs)

    @property
    def generator(self):
        """Q with Q_ij = b_ij off the diagonal and zero row sums"""
        Q = np.array(self.b, dtype=float)
        np.fill_diagonal(Q, 0.0)
        np.fill_diagonal(Q, -Q.sum(axis=1))
        return Q

    @property
    def satisfies_strict(self):
        return all(self.envs[0].same_interactions(t) for t in self.envs[1:])

    def fingerprint(self):
        h = hashlib.sha256()
        h.update(self.mode.value.encode())
        for t in self.envs:
            for arr in (t.a0, t.a_diag, t.a_lower, t.a_upper):
                h.update(np.ascontiguousarray(arr).tobytes())
        h.update(np.ascontiguousarray(self.b).tobytes())
        return h.hexdigest()

    def to_dict(self):
        data = {'n': self.n, 'mode': self.mode.value, 'switching': self.b.tolist()}
        if self.mode is Mode.STRICT:
            shared = self.envs[0].to_dict()
            shared.pop('a0')
            data['shared'] = shared
            data['environments'] = [{'a0': t.a0.tolist()} for t in self.envs]
        else:
            data['environments'] = [t.to_dict() for t in self.envs]
        return data

    def __repr__(self):
        return f'<ModelSpec n={self.n} N={self.N} mode={self.mode.value}>'


@dataclass(frozen=True)
class InvariantBall:
    """B = {x : x_1 + sum_i eps_i x_i <= bound}"""
    weights: np.ndarray
    R: float
    eps_min: float
    gamma: float
    bound: float

    def level(self, x):
        """S(x); accepts a single state or an (m, n) stack"""
        return np.asarray(x, dtype=float) @ self.weights


def validate_model(raw: ModelSpec) -> ModelSpec:
    """
    Check every positivity, irreducibility and shape constraint.

    Errors name the offending coefficient the way the config file spells it,
    e.g. ``environments[0].a0[1]``.
    """
    n = raw.n
    for j, table in enumerate(raw.envs):
        if table.n != n:
            raise DimensionMismatch(f"environments[{j}] has {table.n} species, expected {n}",
                                    field=f'environments[{j}]')
        where = f'environments[{j}]'
        for name in ('a0', 'a_diag', 'a_lower', 'a_upper'):
            for i, value in enumerate(getattr(table, name)):
                if not np.isfinite(value):
                    raise NonPositiveRate(f"{where}.{name}[{i}] must be finite, got {value}",
                                          field=f'{where}.{name}[{i}]', value=float(value))
        for i, value in enumerate(table.a0):
            if not value > 0:
                raise NonPositiveRate(f"{where}.a0[{i}] must be > 0, got {value}",
                                      field=f'{where}.a0[{i}]', value=float(value))
        if not table.a_diag[0] > 0:
            raise NonPositiveRate(f"{where}.a_diag[0] (a_11) must be > 0, got {table.a_diag[0]}",
                                  field=f'{where}.a_diag[0]', value=float(table.a_diag[0]))
        for i, value in enumerate(table.a_diag[1:], start=1):
            if not value >= 0:
                raise NonPositiveRate(f"{where}.a_diag[{i}] must be >= 0, got {value}",
                                      field=f'{where}.a_diag[{i}]', value=float(value))
        for name in ('a_lower', 'a_upper'):
            for i, value in enumerate(getattr(table, name)):
                if not value > 0:
                    raise NonPositiveRate(f"{where}.{name}[{i}] must be > 0, got {value}",
                                          field=f'{where}.{name}[{i}]', value=float(value))

    b = raw.b
    if not np.all(np.isfinite(b)):
        raise ReducibleSwitching("switching rates must be finite")
    for i in range(raw.N):
        if b[i, i] != 0:
            raise ReducibleSwitching(f"switching[{i}][{i}] must be 0, got {b[i, i]}",
                                     field=f'switching[{i}][{i}]')
        for j in range(raw.N):
            if i != j and not b[i, j] > 0:
                raise ReducibleSwitching(f"switching[{i}][{j}] must be > 0, got {b[i, j]}",
                                         field=f'switching[{i}][{j}]')

    if raw.mode is Mode.STRICT and not raw.satisfies_strict:
        raise ModeMismatch("strict mode requires a_diag, a_lower and a_upper shared by all environments")

    logger.debug(f"Validated {raw!r} (strict-compatible: {raw.satisfies_strict})")
    return raw


def check_assumption_switch(model: ModelSpec, variant='bottom'):
    """
    Find environments (b1, b2) whose tables agree everywhere except a_{10}.

    variant='top' looks for a pair that differs only in a_{n0} instead.
    """
    if variant not in ('bottom', 'top'):
        raise ValueError(f"unknown variant {variant!r}")
    target = 0 if variant == 'bottom' else model.n - 1
    mask = np.ones(model.n, dtype=bool)
    mask[target] = False
    for b1 in range(model.N):
        for b2 in range(b1 + 1, model.N):
            t1, t2 = model.envs[b1], model.envs[b2]
            if (t1.a0[target] != t2.a0[target]
                    and np.array_equal(t1.a0[mask], t2.a0[mask])
                    and t1.same_interactions(t2)):
                return b1, b2
    raise AssumptionViolated(
        f"no pair of environments differs only in a_{target + 1}0", variant=variant)


def _check_state(model, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n,):
        raise DimensionMismatch(f"state must have length {model.n}, got {x.shape}")
    if np.any(x < 0):
        raise NegativeState(f"state has negative components: {x.tolist()}", state=x)
    return x


def eval_field(model: ModelSpec, env: int, x) -> np.ndarray:
    """Velocity G^env(x); component i vanishes on the face x_i = 0"""
    if not 0 <= env < model.N:
        raise DomainError(f"environment {env} outside 0..{model.N - 1}", env=env)
    x = _check_state(model, x)
    return model.envs[env].field(x)


def average_table(model: ModelSpec, nu) -> CoefficientTable:
    """Entrywise nu-average of the environment tables"""
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (model.N,):
        raise DimensionMismatch(f"nu must have length {model.N}, got {nu.shape}")
    if model.N == 1:
        return model.envs[0]

    def avg(name):
        return np.einsum('j,ji->i', nu, np.array([getattr(t, name) for t in model.envs]))

    if model.mode is Mode.STRICT:
        return model.envs[0].with_a0(avg('a0'))
    return CoefficientTable(avg('a0'), avg('a_diag'), avg('a_lower'), avg('a_upper'))


def invariant_ball(model: ModelSpec) -> InvariantBall:
    """
    Weighted-sum ball B that every environment's flow leaves positively invariant.

    S = x_1 + sum eps_i x_i satisfies dS/dt <= R - eps_min S with
    R = (gamma + eps_min)^2 / (4 a_11), so B = {S <= R/eps_min + 1}.
    """
    n = model.n
    gamma = max(t.a0[0] for t in model.envs)
    a11 = min(t.a_diag[0] for t in model.envs)

    weights = np.ones(n)
    for i in range(1, n):
        ratio = min(t.a_upper[i - 1] / t.a_lower[i - 1] for t in model.envs)
        weights[i] = weights[i - 1] * ratio

    if n == 1:
        # pure logistic: R/eps_min collapses to the carrying capacity gamma/a_11
        eps_min = gamma
    else:
        eps_min = min(min(1.0, weights[i]) * t.a0[i]
                      for t in model.envs for i in range(1, n))
    R = (gamma + eps_min) ** 2 / (4.0 * a11)
    weights.setflags(write=False)
    return InvariantBall(weights=weights, R=float(R), eps_min=float(eps_min),
                         gamma=float(gamma), bound=float(R / eps_min + 1.0))
