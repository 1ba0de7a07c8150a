"""
Bounds on q^{*k}_k and on lambda_{k+1} when every coefficient may move by
up to epsilon, and the largest epsilon that keeps the sign of lambda_{k+1}.

Shifting each coefficient in the direction that raises delta(k)/Delta_k
gives the upper table; the opposite shifts give the lower table:

    a_10 + e,  a_i0 - e (i >= 2),  a_{i,i-1} + e,  a_ii - e,  a_{i,i+1} - e
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import Config
from .environment import stationary_distribution
from .equilibria import delta_series
from .errors import DomainError, EpsilonTooLarge, OracleMismatch
from .invasion import invasion_rate_boundary
from .models import CoefficientTable, ModelSpec, average_table

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-6
EXISTENCE_CAVEAT = ('bounds assume the perturbed model has an ergodic measure with the same '
                    'support; its existence for this epsilon is not checked')


def _shifted(table: CoefficientTable, eps: float, sign: int, k: int) -> CoefficientTable:
    """Table with the first min(k+1, n) species shifted by sign*eps"""
    n = table.n
    m = min(k + 1, n)
    s = sign * eps
    a0 = table.a0.copy()
    a_diag = table.a_diag.copy()
    a_lower = table.a_lower.copy()
    a_upper = table.a_upper.copy()

    a0[0] += s
    a0[1:m] -= s
    a_diag[:m] -= s
    a_lower[:m - 1] += s
    a_upper[:m - 1] -= s

    checks = [('a0', a0[:m]), ('a_diag', a_diag[:1]),
              ('a_lower', a_lower[:m - 1]), ('a_upper', a_upper[:m - 1])]
    for name, values in checks:
        bad = np.flatnonzero(values <= 0)
        if bad.size:
            raise EpsilonTooLarge(
                f"epsilon={eps} drives {name}[{int(bad[0])}] to {values[bad[0]]:.6g}",
                epsilon=eps, field=f'{name}[{int(bad[0])}]')
    # a_ii >= 0 for i >= 2 is all that is required there
    a_diag[1:] = np.maximum(a_diag[1:], 0.0)
    return CoefficientTable(a0, a_diag, a_lower, a_upper)


def validity_cap(table: CoefficientTable, k: int) -> float:
    """Supremum of the epsilons accepted by perturbation_bounds"""
    m = min(k + 1, table.n)
    return float(min(np.min(table.a0[:m]), table.a_diag[0],
                     np.min(table.a_lower[:m - 1], initial=np.inf),
                     np.min(table.a_upper[:m - 1], initial=np.inf)))


@dataclass(frozen=True)
class SensitivityBounds:
    epsilon: float
    k: int
    q_k: float
    f_lower: float
    f_upper: float
    rate: Optional[float] = None
    g_lower: Optional[float] = None
    g_upper: Optional[float] = None
    sandwich_checked: bool = False

    @property
    def rate_interval(self):
        if self.g_lower is None:
            return None
        return (self.g_lower, self.g_upper)

    @property
    def sign_definite(self):
        return self.g_lower is not None and (self.g_lower > 0 or self.g_upper < 0)

    def to_dict(self):
        return {
            'epsilon': self.epsilon,
            'k': self.k,
            'q_star_k': self.q_k,
            'f_lower': self.f_lower,
            'f_upper': self.f_upper,
            'lambda': self.rate,
            'g_lower': self.g_lower,
            'g_upper': self.g_upper,
            'rate_interval': None if self.rate_interval is None else list(self.rate_interval),
            'sign_definite': self.sign_definite,
            'sandwich_checked': self.sandwich_checked,
            'caveat': EXISTENCE_CAVEAT,
        }


def _bounds(table: CoefficientTable, epsilon: float, k: int, d, D) -> SensitivityBounds:
    n = table.n
    upper = _shifted(table, epsilon, +1, k)
    lower = _shifted(table, epsilon, -1, k)
    d_up, D_up, _ = delta_series(upper)
    d_lo, D_lo, _ = delta_series(lower)
    f_upper = float(d_up[k - 1] / D_up[k])
    f_lower = float(d_lo[k - 1] / D_lo[k])
    q_k = float(d[k - 1] / D[k])

    rate = g_lower = g_upper = None
    if k < n:
        g_upper = float(-(table.a0[k] - epsilon) + (table.a_lower[k - 1] + epsilon) * f_upper)
        g_lower = float(-(table.a0[k] + epsilon) + (table.a_lower[k - 1] - epsilon) * f_lower)
        for label, g, dd, DD in (('g(+e)', g_upper, d_up, D_up), ('g(-e)', g_lower, d_lo, D_lo)):
            via = dd[k] / DD[k]
            if abs(g - via) > 1e-10 * max(1.0, abs(g), abs(via)):
                raise OracleMismatch(f"{label} = {g!r} but delta/Delta = {via!r}", g=g, via_delta=via)
        rate = float(d[k] / D[k])

    # proven only for a positive q^{*k}
    positive = bool(np.all(d[:k] > 0))
    if positive:
        slack = 1e-12 * max(1.0, abs(q_k))
        if not f_lower - slack <= q_k <= f_upper + slack:
            raise OracleMismatch(f"sandwich {f_lower!r} <= {q_k!r} <= {f_upper!r} violated",
                                 epsilon=epsilon, k=k)
        if rate is not None and not g_lower - slack <= rate <= g_upper + slack:
            raise OracleMismatch(f"rate sandwich {g_lower!r} <= {rate!r} <= {g_upper!r} violated",
                                 epsilon=epsilon, k=k)

    return SensitivityBounds(epsilon=float(epsilon), k=k, q_k=q_k, f_lower=f_lower,
                             f_upper=f_upper, rate=rate, g_lower=g_lower, g_upper=g_upper,
                             sandwich_checked=positive)


def perturbation_bounds(model: ModelSpec, epsilon: float, k: int) -> SensitivityBounds:
    """
    f_k(-e) <= q^{*k}_k <= f_k(e) with f_k(e) = delta^e(k)/Delta^e_k, and
    g_{k+1}(+-e) = -(a_{k+1,0} -+ e) + (a_{k+1,k} +- e) f_k(+-e) bracketing
    lambda_{k+1}, all on the nu-averaged table.
    """
    table = average_table(model, stationary_distribution(model.b))
    if not 1 <= k <= table.n:
        raise DomainError(f"k={k} outside 1..{table.n}", k=k)
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}", epsilon=epsilon)
    d, D, _ = delta_series(table)
    bounds = _bounds(table, float(epsilon), k, d, D)
    logger.debug(f"eps={epsilon}: f in [{bounds.f_lower:.6g}, {bounds.f_upper:.6g}]")
    return bounds


@dataclass(frozen=True)
class StabilityRadius:
    k: int
    rate: float
    radius: float
    cap: float
    degenerate: bool = False

    def to_dict(self):
        return {'k': self.k, 'lambda': self.rate, 'radius': self.radius,
                'validity_cap': self.cap, 'degenerate': self.degenerate,
                'tolerance': BISECTION_TOL, 'derived': True}


def sign_stability_radius(model: ModelSpec, k: int, tol=BISECTION_TOL) -> StabilityRadius:
    """
    Largest epsilon (to within tol) for which g_{k+1}(-e) and g_{k+1}(e) share
    the sign of lambda_{k+1}, found by bisection below the validity cap.
    """
    if k < 1:
        raise DomainError(f"sign radius needs a non-empty prefix, got k={k}", k=k)
    table = average_table(model, stationary_distribution(model.b))
    rate = invasion_rate_boundary(model, k).rate
    cap = validity_cap(table, k)
    if abs(rate) <= Config.TOL_ZERO * max(1.0, abs(table.a0[k])):
        logger.warning(f"⚠️ lambda_{k + 1} is numerically zero; sign radius is 0")
        return StabilityRadius(k=k, rate=rate, radius=0.0, cap=cap, degenerate=True)

    d, D, _ = delta_series(table)

    def definite(eps):
        b = _bounds(table, eps, k, d, D)
        return b.g_lower > 0 if rate > 0 else b.g_upper < 0

    lo, hi = 0.0, cap
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if definite(mid):
            lo = mid
        else:
            hi = mid
    logger.info(f"✅ sign of lambda_{k + 1} = {rate:+.6g} is stable up to epsilon ~ {lo:.6g}")
    return StabilityRadius(k=k, rate=rate, radius=lo, cap=cap)
