"""
Closed-form equilibrium algebra of the food chain.

A_1^k (products of disjoint adjacent transpositions), the continuant Delta_k,
delta(k), the restricted equilibria q^{*k} and the persistence classification.
Every closed form is paired with an independent oracle; disagreement raises
OracleMismatch rather than returning a doubtful number.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .config import Config
from .environment import stationary_distribution
from .errors import DegenerateBoundary, DimensionMismatch, OracleMismatch, TooLarge
from .models import CoefficientTable, ModelSpec, average_table

logger = logging.getLogger(__name__)

MAX_ENUMERATION = 25
ORACLE_RTOL = 1e-8
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class Matching:
    """Permutation of {0..k-1} built from disjoint adjacent transpositions"""
    image: tuple

    @property
    def k(self):
        return len(self.image)

    @property
    def pairs(self):
        return tuple((i, i + 1) for i in range(self.k - 1) if self.image[i] == i + 1)

    def __call__(self, i):
        return self.image[i]

    def __str__(self):
        if not self.pairs:
            return 'Id'
        return ''.join(f'({i + 1} {i + 2})' for i, _ in self.pairs)


@lru_cache(maxsize=None)
def _matchings(k):
    if k == 0:
        return ((),)
    if k == 1:
        return ((0,),)
    keep = tuple(alpha + (k - 1,) for alpha in _matchings(k - 1))
    swap = tuple(alpha + (k - 1, k - 2) for alpha in _matchings(k - 2))
    return keep + swap


def matchings(k: int):
    """A_1^k via A_1^k = A_1^{k-1} U {alpha (k-1 k) : alpha in A_1^{k-2}}"""
    if k < 1:
        raise DimensionMismatch(f"k must be >= 1, got {k}")
    if k > MAX_ENUMERATION:
        raise TooLarge(f"enumerating A_1^{k} is capped at k <= {MAX_ENUMERATION}", k=k)
    return [Matching(image) for image in _matchings(k)]


def _matching_weight(table, image):
    w = 1.0
    for i, j in enumerate(image):
        if j == i:
            w *= table.a_diag[i]
        elif j == i + 1:
            w *= table.a_upper[i]
        else:
            w *= table.a_lower[j]
    return w


def continuant_direct(table: CoefficientTable, k: int) -> float:
    """Delta_k as the sum over A_1^k of prod a_{i,alpha(i)}"""
    if k == 0:
        return 1.0
    return math.fsum(_matching_weight(table, m.image) for m in matchings(k))


def continuant_series(table: CoefficientTable) -> np.ndarray:
    """Delta_0..Delta_n by the three-term recurrence"""
    n = table.n
    D = np.empty(n + 1)
    D[0] = 1.0
    D[1] = table.a_diag[0]
    for k in range(2, n + 1):
        D[k] = table.a_diag[k - 1] * D[k - 1] + table.a_lower[k - 2] * table.a_upper[k - 2] * D[k - 2]
    return D


def _check_close(label, value, oracle, rtol):
    scale = max(abs(value), abs(oracle))
    if abs(value - oracle) > rtol * scale:
        raise OracleMismatch(f"{label}: {value!r} vs oracle {oracle!r}",
                             value=value, oracle=oracle)


def continuant(table: CoefficientTable, k: int, verify=True) -> float:
    """Delta_k; the recurrence is checked against the direct matching sum up to k = 25"""
    if not 0 <= k <= table.n:
        raise DimensionMismatch(f"k={k} outside 0..{table.n}")
    value = float(continuant_series(table)[k])
    if verify and k <= MAX_ENUMERATION:
        _check_close(f"Delta_{k} recurrence", value, continuant_direct(table, k), 1e-12)
    return value


def delta_direct(table: CoefficientTable, k: int) -> float:
    """delta(k) = a_10 prod a_{i,i-1} - sum_m a_m0 prod_{i>m} a_{i,i-1} Delta_{m-1}, term by term"""
    if not 1 <= k <= table.n:
        raise DimensionMismatch(f"k={k} outside 1..{table.n}")
    lower = table.a_lower
    head = table.a0[0] * math.prod(lower[:k - 1])
    tail = math.fsum(
        table.a0[m - 1] * math.prod(lower[m - 1:k - 1]) * continuant_direct(table, m - 1)
        for m in range(2, k + 1)
    )
    return head - tail


def delta_series(table: CoefficientTable):
    """
    delta(1..n) and Delta_0..n by recurrence.

    Returns (delta, Delta, scale) where scale[k-1] is the magnitude of the two
    terms combined into delta(k); it sizes the degenerate-boundary band.
    """
    n = table.n
    D = continuant_series(table)
    d = np.empty(n)
    scale = np.empty(n)
    d[0] = table.a0[0]
    scale[0] = abs(table.a0[0])
    for k in range(2, n + 1):
        grow = table.a_lower[k - 2] * d[k - 2]
        die = table.a0[k - 1] * D[k - 1]
        d[k - 1] = grow - die
        scale[k - 1] = max(abs(grow), abs(die))
    return d, D, scale


def delta(table: CoefficientTable, k: int, verify=True) -> float:
    """delta(k); the recurrence delta(k) = a_{k,k-1} delta(k-1) - a_{k0} Delta_{k-1} is the secondary oracle"""
    if not 1 <= k <= table.n:
        raise DimensionMismatch(f"k={k} outside 1..{table.n}")
    d, _, scale = delta_series(table)
    value = float(d[k - 1])
    if verify and k - 1 <= MAX_ENUMERATION:
        direct = delta_direct(table, k)
        if abs(value - direct) > 1e-10 * max(scale[k - 1], abs(direct)):
            raise OracleMismatch(f"delta({k}) recurrence {value!r} vs direct sum {direct!r}",
                                 value=value, oracle=direct)
    return value


@dataclass(frozen=True)
class EquilibriumProfile:
    k: int
    q: np.ndarray
    delta: float
    Delta: float
    Delta_prev: float

    @property
    def positive(self):
        return self.delta > 0

    def to_dict(self):
        return {'k': self.k, 'q': self.q.tolist(), 'delta': self.delta,
                'Delta': self.Delta, 'Delta_prev': self.Delta_prev,
                'positive': self.positive}


def tridiagonal_system(table: CoefficientTable):
    """Banded form (for solve_banded) and right-hand side of F_{|k}(q) = 0"""
    k = table.n
    ab = np.zeros((3, k))
    ab[1] = table.a_diag
    if k > 1:
        ab[0, 1:] = table.a_upper
        ab[2, :-1] = -table.a_lower
    rhs = -table.a0.copy()
    rhs[0] = table.a0[0]
    return ab, rhs


def equilibrium_solve(table: CoefficientTable) -> np.ndarray:
    """Oracle: LAPACK banded solve of F_{|k}(q) = 0"""
    ab, rhs = tridiagonal_system(table)
    return solve_banded((1, 1), ab, rhs)


def check_residual(table: CoefficientTable, q) -> float:
    """
    Largest |F_i(q)| relative to the size of the terms it sums; raises
    OracleMismatch above RESIDUAL_RTOL.
    """
    q = np.asarray(q, dtype=float)
    size = np.abs(table.a0) + table.a_diag * np.abs(q)
    if table.n > 1:
        size[1:] += table.a_lower * np.abs(q[:-1])
        size[:-1] += table.a_upper * np.abs(q[1:])
    residual = float(np.max(np.abs(table.growth(q)) / size))
    if residual > RESIDUAL_RTOL:
        raise OracleMismatch(f"F(q*{table.n}) = {table.growth(q).tolist()} is not zero",
                             relative_residual=residual)
    return residual


def equilibrium(table: CoefficientTable, k: int) -> EquilibriumProfile:
    """
    q^{*k}: q_k = delta(k)/Delta_k, then back-substitution upwards through
    equations k..2, each of which has a single unknown.
    """
    sub = table.restrict(k)
    d, D, _ = delta_series(sub)
    q = np.zeros(k + 1)  # q[k] is the absent species k+1
    q[k - 1] = d[k - 1] / D[k]
    for i in range(k - 2, -1, -1):
        # equation of species i+2 (1-based) solved for x_{i+1}
        up = sub.a_upper[i + 1] * q[i + 2] if i + 1 < k - 1 else 0.0
        q[i] = (sub.a0[i + 1] + sub.a_diag[i + 1] * q[i + 1] + up) / sub.a_lower[i]
    q = q[:k]

    oracle = equilibrium_solve(sub)
    tol = ORACLE_RTOL * max(1.0, float(np.max(np.abs(oracle))))
    if not np.all(np.abs(q - oracle) <= tol):
        raise OracleMismatch(f"q*{k} closed form disagrees with the linear solve",
                             closed_form=q, oracle=oracle)
    residual = check_residual(sub, q)
    logger.debug(f"q*{k} = {q.tolist()} residual {residual:.2e}")
    q.setflags(write=False)
    return EquilibriumProfile(k=k, q=q, delta=float(d[k - 1]), Delta=float(D[k]),
                              Delta_prev=float(D[k - 1]))


class Verdict(str, enum.Enum):
    PERSISTENT = 'Persistent'
    EXTINCT_ABOVE_K = 'Extinct-above-k'
    DEGENERATE = 'Degenerate'


@dataclass
class ClassificationReport:
    k_star: int
    verdict: Verdict
    nu: np.ndarray
    table: CoefficientTable
    delta: np.ndarray
    Delta: np.ndarray
    profiles: list = field(default_factory=list)
    extinction_rates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    I_minus: float | None = None
    degenerate_k: list = field(default_factory=list)

    @property
    def n(self):
        return self.table.n

    @property
    def q_star(self):
        if self.k_star == 0:
            return np.zeros(0)
        return self.profiles[self.k_star - 1].q

    def to_dict(self):
        return {
            'k_star': self.k_star,
            'verdict': self.verdict.value,
            'nu': self.nu.tolist(),
            'averaged_table': self.table.to_dict(),
            'q_star': self.q_star.tolist(),
            'delta': self.delta.tolist(),
            'Delta': self.Delta.tolist(),
            'profiles': [p.to_dict() for p in self.profiles],
            'extinction_rates': self.extinction_rates.tolist(),
            'extinct_species': list(range(self.k_star, self.n)),
            'I_minus': self.I_minus,
            'degenerate_k': self.degenerate_k,
        }


def classify(model: ModelSpec, tol_zero=None) -> ClassificationReport:
    """
    Persistence verdict from the signs of delta^nu(k).

    k_star is the length of the positive prefix. Species k_star+1 dies at rate
    I^-_{k_star+1} = -a^nu_{k_star+1,0} + a_{k_star+1,k_star} q^{*k_star}_{k_star},
    the species above it at -a^nu_{i0}.
    """
    rel = Config.TOL_ZERO if tol_zero is None else tol_zero
    nu = stationary_distribution(model.b)
    table = average_table(model, nu)
    d, D, scale = delta_series(table)
    n = table.n

    band = rel * scale
    degenerate = [k + 1 for k in range(n) if abs(d[k]) <= band[k]]
    k_star = 0
    while k_star < n and d[k_star] > band[k_star]:
        k_star += 1
    if any(d[k] > band[k] for k in range(k_star, n)):
        raise OracleMismatch("delta^nu changes sign more than once along the chain",
                             delta=d)
    if k_star == 0:
        # delta(1) = a_10^nu > 0 for any valid model
        raise OracleMismatch("delta^nu(1) is not positive", delta=d)

    profiles = [equilibrium(table, k) for k in range(1, min(k_star + 1, n) + 1)]
    for p in profiles[:k_star]:
        if not np.all(p.q > 0):
            raise OracleMismatch(f"q*{p.k} has delta > 0 but a non-positive component",
                                 q=p.q)

    report = ClassificationReport(
        k_star=k_star,
        verdict=Verdict.PERSISTENT if k_star == n else Verdict.EXTINCT_ABOVE_K,
        nu=nu, table=table, delta=d, Delta=D, profiles=profiles,
        degenerate_k=degenerate,
    )

    if degenerate:
        report.verdict = Verdict.DEGENERATE
        logger.warning(f"⚠️ delta^nu(k) within the zero band for k = {degenerate}")
        raise DegenerateBoundary(
            f"delta^nu(k) is numerically zero for k = {degenerate}: persistence "
            f"and extinction are both undecided", report=report, k=degenerate)

    if k_star < n:
        q_k = profiles[k_star - 1].q[k_star - 1]
        I_minus = -table.a0[k_star] + table.a_lower[k_star - 1] * q_k
        _check_close("I^- via delta/Delta", I_minus, d[k_star] / D[k_star], 1e-10)
        if not I_minus < 0:
            raise OracleMismatch(f"I^-_{k_star + 1} = {I_minus} is not negative",
                                 I_minus=I_minus)
        rates = np.concatenate([[I_minus], -table.a0[k_star + 1:]])
        report.extinction_rates = rates
        report.I_minus = float(I_minus)

    logger.info(f"✅ Classified {model!r}: {report.verdict.value}, k* = {k_star}")
    return report
