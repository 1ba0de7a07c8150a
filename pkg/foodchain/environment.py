"""
The switching environment J(t): stationary law, seeded random streams and
exact jump sampling.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from .errors import SingularSolve

logger = logging.getLogger(__name__)

RNG_ALGORITHM = 'numpy.PCG64 seeded through numpy.SeedSequence'


def generator_matrix(b):
    b = np.array(b, dtype=float)
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return b


def stationary_distribution(b) -> np.ndarray:
    """
    Unique nu with nu Q = 0 and sum(nu) = 1.

    Uses the Grassmann-Taksar-Heyman elimination: subtraction free, so every
    entry stays positive for an irreducible chain.
    """
    Q = generator_matrix(b)
    N = Q.shape[0]
    if N == 1:
        return np.ones(1)

    T = Q.copy()
    for k in range(N - 1, 0, -1):
        s = T[k, :k].sum()
        if not s > 0:
            raise SingularSolve(f"state {k} has no outgoing rate to lower states", state=k)
        T[:k, k] /= s
        T[:k, :k] += np.outer(T[:k, k], T[k, :k])

    nu = np.zeros(N)
    nu[0] = 1.0
    for k in range(1, N):
        nu[k] = nu[:k] @ T[:k, k]
    nu /= math.fsum(nu)

    residual = float(np.max(np.abs(nu @ Q)))
    scale = max(1.0, float(np.max(np.abs(Q))))
    if not np.all(nu > 0) or residual > 1e-12 * scale:
        raise SingularSolve(f"stationary solve failed (residual {residual:.3e})",
                            residual=residual)
    return nu


def derive_seed(seed, index):
    """Seed of ensemble member `index`: SeedSequence([seed, index]) -> one uint64"""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RngState:
    """Single-owner seeded stream; `draws` counts uniforms consumed so far"""

    algorithm = RNG_ALGORITHM

    def __init__(self, seed):
        self.seed = int(seed)
        self.draws = 0
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def uniform(self):
        self.draws += 1
        return float(self._gen.random())

    def __repr__(self):
        return f'<RngState seed={self.seed} draws={self.draws}>'


def sample_jump(rng: RngState, i: int, b):
    """
    Holding time in environment i and the environment entered next.

    Holding time is -ln(U)/lambda_i with lambda_i = sum_j b_ij; the destination
    is drawn with probabilities b_ij / lambda_i. A single environment never jumps.
    """
    rates = np.array(b[i], dtype=float)
    rates[i] = 0.0
    lam = rates.sum()
    if lam <= 0:
        return math.inf, i

    # 1 - U lies in (0, 1], so the log is finite
    holding = -math.log(1.0 - rng.uniform()) / lam

    u = rng.uniform() * lam
    cumulative = np.cumsum(rates)
    nxt = int(np.searchsorted(cumulative, u, side='right'))
    nxt = min(nxt, len(rates) - 1)
    while rates[nxt] == 0.0:
        nxt -= 1
    return holding, nxt
