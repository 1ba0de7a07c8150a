"""
Invasion rates against boundary measures and per-environment favourability.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .environment import stationary_distribution
from .equilibria import delta_series, equilibrium
from .errors import DimensionMismatch, OracleMismatch, PrefixNotPositive
from .models import Mode, ModelSpec, average_table
from .occupation import OccupationMeasure, invasion_rate_empirical

logger = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-10


@dataclass(frozen=True)
class BoundaryRate:
    """lambda_{k+1} against the measure living on the first k species"""
    k: int
    rate: float
    via_delta: float
    q: np.ndarray

    @property
    def invades(self):
        return self.rate > 0

    def to_dict(self):
        return {'k': self.k, 'species': self.k + 1, 'lambda': self.rate,
                'delta_over_Delta': self.via_delta, 'q_star_k': self.q.tolist(),
                'invades': self.invades}


def _positive_prefix(d, k):
    return all(d[i] > 0 for i in range(k))


def invasion_rate_boundary(model: ModelSpec, k: int) -> BoundaryRate:
    """
    lambda_{k+1} = -a^nu_{k+1,0} + a_{k+1,k} q^{*k}_k, cross-checked against
    delta^nu(k+1)/Delta_k. k = 0 is the origin, where lambda_1 = a^nu_{10}.
    """
    nu = stationary_distribution(model.b)
    table = average_table(model, nu)
    n = table.n
    if not 0 <= k < n:
        raise DimensionMismatch(f"boundary prefix k={k} outside 0..{n - 1}", k=k)
    d, D, _ = delta_series(table)
    if not _positive_prefix(d, k):
        raise PrefixNotPositive(f"q*{k} is not positive (delta^nu = {d[:k].tolist()})",
                                k=k, delta=d[:k])

    if k == 0:
        q = np.zeros(0)
        rate = float(table.a0[0])
        scale = abs(rate)
    else:
        q = equilibrium(table, k).q
        gain = table.a_lower[k - 1] * q[k - 1]
        rate = float(-table.a0[k] + gain)
        scale = max(abs(table.a0[k]), abs(gain))
    via = float(d[k] / D[k])

    if abs(rate - via) > IDENTITY_RTOL * scale:
        raise OracleMismatch(f"lambda_{k + 1} direct {rate!r} vs delta/Delta {via!r}",
                             rate=rate, via_delta=via)
    logger.debug(f"lambda_{k + 1} at boundary k={k}: {rate:+.6g}")
    return BoundaryRate(k=k, rate=rate, via_delta=via, q=q)


def lambda_zero_check(occ: OccupationMeasure, model: ModelSpec, k: int) -> np.ndarray:
    """|lambda_i(Pi)| for the k species a boundary-started path keeps alive"""
    if not 1 <= k <= model.n:
        raise DimensionMismatch(f"k={k} outside 1..{model.n}")
    return np.array([abs(invasion_rate_empirical(occ, model, i)) for i in range(k)])


@dataclass
class Favorability:
    nu: np.ndarray
    prefix: list                 # m_j per environment
    delta: list                  # delta^j(1..n) per environment
    attractors: list             # equilibrium of F^j on its favourable prefix, padded to n
    averaged_prefix: int
    averaged_delta: np.ndarray
    identity: list = field(default_factory=list)

    def to_dict(self):
        return {
            'nu': self.nu.tolist(),
            'favourable_prefix': self.prefix,
            'delta': [d.tolist() for d in self.delta],
            'attractors': [a.tolist() for a in self.attractors],
            'averaged_prefix': self.averaged_prefix,
            'averaged_delta': self.averaged_delta.tolist(),
            'identity': self.identity,
        }


def _largest_positive(d):
    positive = np.flatnonzero(d > 0)
    return int(positive[-1]) + 1 if positive.size else 0


def env_favorability(model: ModelSpec) -> Favorability:
    """
    m_j = max{m : delta^j(m) > 0} per environment.

    In strict mode also checks lambda_{k+1} = (1/Delta_k) sum_j nu_j delta^j(k+1)
    along the positive prefix of the averaged chain.
    """
    nu = stationary_distribution(model.b)
    n = model.n
    prefixes, deltas, attractors = [], [], []
    for j, table in enumerate(model.envs):
        d, _, _ = delta_series(table)
        m = _largest_positive(d)
        x_bar = np.zeros(n)
        if m > 0:
            x_bar[:m] = equilibrium(table, m).q
        prefixes.append(m)
        deltas.append(d)
        attractors.append(x_bar)

    averaged = average_table(model, nu)
    d_nu, D_nu, _ = delta_series(averaged)
    report = Favorability(nu=nu, prefix=prefixes, delta=deltas, attractors=attractors,
                          averaged_prefix=_largest_positive(d_nu), averaged_delta=d_nu)

    if model.mode is Mode.STRICT:
        for k in range(n):
            if not _positive_prefix(d_nu, k):
                break
            rate = invasion_rate_boundary(model, k).rate
            mixed = math.fsum(nu[j] * deltas[j][k] for j in range(model.N)) / D_nu[k]
            if abs(rate - mixed) > IDENTITY_RTOL * max(abs(rate), abs(mixed), abs(averaged.a0[k])):
                raise OracleMismatch(f"lambda_{k + 1} = {rate!r} but sum_j nu_j delta^j/Delta = {mixed!r}",
                                     k=k, rate=rate, mixed=mixed)
            report.identity.append({'k': k, 'lambda': rate, 'weighted_delta': mixed})

    logger.info(f"Favourable prefixes per environment: {prefixes} (averaged: {report.averaged_prefix})")
    return report
