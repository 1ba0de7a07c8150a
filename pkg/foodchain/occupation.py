"""
Empirical occupation measures Pi_t of a simulated path and the statistics
read off them: invasion rates lambda_i, generator averages and the
pathwise log-growth identity.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError
from .models import ModelSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OccupationMeasure:
    """
    Weighted samples per environment. points[j] is (m_j, n), weights[j] is
    (m_j,); weights are nonnegative and sum to 1 over all environments.
    """
    points: tuple
    weights: tuple

    @property
    def N(self):
        return len(self.points)

    @property
    def n(self):
        return self.points[0].shape[1]

    @property
    def env_mass(self):
        return np.array([math.fsum(w) for w in self.weights])

    @property
    def total_mass(self):
        return math.fsum(math.fsum(w) for w in self.weights)

    def integrate(self, fn):
        """sum_j int fn(x, j) dmu^j(x); fn maps an (m, n) stack to m values"""
        return math.fsum(
            float(np.dot(w, fn(x, j))) for j, (x, w) in enumerate(zip(self.points, self.weights))
            if w.size
        )

    def mean(self):
        """Mixed first moments sum_j int x_i dmu^j"""
        total = np.zeros(self.n)
        for x, w in zip(self.points, self.weights):
            if w.size:
                total += w @ x
        return total

    def moment(self, powers):
        """sum_j int prod_i x_i^p_i dmu^j"""
        powers = np.asarray(powers, dtype=float)
        if powers.shape != (self.n,):
            raise DimensionMismatch(f"powers must have length {self.n}")
        return self.integrate(lambda x, j: np.prod(x ** powers, axis=1))

    def histogram(self, i, bins=50, range=None):
        """Weighted histogram of species i across all environments (for plotting only)"""
        x = np.concatenate([p[:, i] for p in self.points])
        w = np.concatenate(self.weights)
        return np.histogram(x, bins=bins, range=range, weights=w)

    @classmethod
    def point_mass(cls, x, nu):
        """delta_x (x) nu"""
        x = np.asarray(x, dtype=float)
        nu = np.asarray(nu, dtype=float)
        return cls(points=tuple(x[None, :].copy() for _ in nu),
                   weights=tuple(np.array([v]) for v in nu))

    def to_dict(self):
        return {
            'env_mass': self.env_mass.tolist(),
            'total_mass': self.total_mass,
            'mean': self.mean().tolist(),
        }


def occupation(traj) -> OccupationMeasure:
    """
    Pi_T of a trajectory.

    Each accepted step [t_k, t_k + h] contributes Simpson weights h/6, 4h/6,
    h/6 at its start, its Hermite midpoint and its end; the result is divided
    by the total duration.
    """
    N = traj.N
    pts = [[] for _ in range(N)]
    wts = [[] for _ in range(N)]
    durations = []

    for seg in traj.segments:
        h = seg.steps
        if h.size == 0:
            continue
        node = np.zeros(h.size + 1)
        node[:-1] += h / 6.0
        node[1:] += h / 6.0
        pts[seg.env].extend([seg.states, seg.midpoints])
        wts[seg.env].extend([node, 4.0 * h / 6.0])
        durations.append(math.fsum(h))

    total = math.fsum(durations)
    if not total > 0:
        raise DomainError("trajectory has zero duration")
    n = traj.n
    points = tuple(np.vstack(p) if p else np.zeros((0, n)) for p in pts)
    weights = tuple(np.concatenate(w) / total if w else np.zeros(0) for w in wts)
    return OccupationMeasure(points=points, weights=weights)


def _pad(occ: OccupationMeasure, model: ModelSpec) -> OccupationMeasure:
    """Extend to all N environments when the path never visited the last ones"""
    if occ.N > model.N:
        raise DimensionMismatch(f"occupation has {occ.N} environments, model has {model.N}")
    if occ.N == model.N:
        return occ
    extra = model.N - occ.N
    return OccupationMeasure(points=occ.points + tuple(np.zeros((0, occ.n)) for _ in range(extra)),
                             weights=occ.weights + tuple(np.zeros(0) for _ in range(extra)))


def invasion_rate_empirical(occ: OccupationMeasure, model: ModelSpec, i: int) -> float:
    """lambda_i(mu) = sum_j int F_i^j dmu^j"""
    occ = _pad(occ, model)
    return occ.integrate(lambda x, j: model.envs[j].growth(x)[:, i])


def invasion_rates_empirical(occ: OccupationMeasure, model: ModelSpec) -> np.ndarray:
    return np.array([invasion_rate_empirical(occ, model, i) for i in range(model.n)])


def path_identity_residual(traj, model: ModelSpec, i: int, occ=None) -> float:
    """
    |(ln X_i(T) - ln X_i(0))/T - lambda_i(Pi_T)|.

    Holds exactly along every path, so the residual measures integration and
    quadrature error only.
    """
    if not traj.x0[i] > 0:
        raise DomainError(f"species {i} starts on its invariant face", species=i)
    occ = occupation(traj) if occ is None else occ
    growth = (traj.final_log_state[i] - math.log(traj.x0[i])) / traj.final_time
    return abs(growth - invasion_rate_empirical(occ, model, i))


def apply_generator(model: ModelSpec, g, grad_g, x, j: int) -> float:
    """Lg(x, j) = <G^j(x), grad g(x, j)> + sum_k b_jk (g(x, k) - g(x, j))"""
    x = np.asarray(x, dtype=float)
    drift = float(np.dot(model.envs[j].field(x), grad_g(x, j)))
    here = g(x, j)
    jumps = math.fsum(model.b[j, k] * (g(x, k) - here) for k in range(model.N) if k != j)
    return drift + jumps


def generator_time_average(occ: OccupationMeasure, model: ModelSpec, g, grad_g) -> float:
    """int Lg dPi_T; tends to 0 along long paths"""
    occ = _pad(occ, model)

    def values(x, j):
        return np.array([apply_generator(model, g, grad_g, row, j) for row in x])

    return occ.integrate(values)


def boundary_support(occ: OccupationMeasure, tol=1e-6):
    """
    Species carrying non-negligible mean occupation, and whether that set is a
    prefix {1..k} of the chain.
    """
    mean = occ.mean()
    support = tuple(int(i) for i in np.flatnonzero(mean > tol))
    is_prefix = support == tuple(range(len(support)))
    return support, is_prefix
