"""
Bracket sequence for the strong Hörmander condition.

Two environments beta1, beta2 that differ only in a_{10} give
b^1 = G^{beta1} - G^{beta2} supported on e_1, and b^{k+1} = [b^k, G^{beta1}]
fills one more row each time, so the bracket matrix is upper triangular with
diagonal (G_1^{beta1} - G_1^{beta2}) prod_{i=2}^k a_{i,i-1} x_i.

Brackets are built symbolically with sympy; [V, W] = DW V - DV W. A second,
independent evaluation uses central finite-difference Jacobians.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import sympy as sp

from .config import Config
from .errors import AssumptionViolated, OracleMismatch
from .models import CoefficientTable, ModelSpec, _check_state, check_assumption_switch

logger = logging.getLogger(__name__)

NUMERIC_RTOL = 1e-6
CLOSED_FORM_RTOL = 1e-9
_FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)

MAX_CACHED_SYSTEMS = 32


def field_expressions(table: CoefficientTable, xs):
    """G_i = x_i F_i as sympy expressions"""
    n = table.n
    exprs = []
    for i in range(n):
        F = (1 if i == 0 else -1) * sp.Float(table.a0[i]) - sp.Float(table.a_diag[i]) * xs[i]
        if i > 0:
            F += sp.Float(table.a_lower[i - 1]) * xs[i - 1]
        if i < n - 1:
            F -= sp.Float(table.a_upper[i]) * xs[i + 1]
        exprs.append(sp.expand(xs[i] * F))
    return sp.Matrix(exprs)


def lie_bracket(V, W, xs):
    """[V, W] = DW V - DV W for column vector fields V, W"""
    return sp.expand(W.jacobian(xs) * V - V.jacobian(xs) * W)


class BracketSystem:
    """Symbolic b^1..b^n for one model and pair, compiled to numpy callables"""

    def __init__(self, model: ModelSpec, pair, variant='bottom'):
        n = model.n
        self.pair = tuple(pair)
        self.variant = variant
        self.n = n
        self.xs = sp.symbols(f'x1:{n + 1}', real=True)
        self.G = field_expressions(model.envs[pair[0]], self.xs)
        other = field_expressions(model.envs[pair[1]], self.xs)
        columns = [sp.expand(self.G - other)]
        for _ in range(1, n):
            columns.append(lie_bracket(columns[-1], self.G, self.xs))
        self.columns = columns
        self._matrix = sp.lambdify(self.xs, sp.Matrix.hstack(*columns), 'numpy')
        self._column_fns = [sp.lambdify(self.xs, list(c), 'numpy') for c in columns]

    def matrix(self, x):
        return np.array(self._matrix(*x), dtype=float).reshape(self.n, self.n)

    def column(self, k, x):
        return np.array(self._column_fns[k](*x), dtype=float).reshape(self.n)


class _SystemKey:
    """Hashes on (fingerprint, pair, variant) so equal models share one system"""
    __slots__ = ('model', 'key')

    def __init__(self, model, pair, variant):
        self.model = model
        self.key = (model.fingerprint(), tuple(pair), variant)

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, _SystemKey) and self.key == other.key


@lru_cache(maxsize=MAX_CACHED_SYSTEMS)
def _cached_system(entry: _SystemKey) -> BracketSystem:
    _, pair, variant = entry.key
    logger.debug(f"Building bracket system for pair {pair} ({variant}) of {entry.model!r}")
    return BracketSystem(entry.model, pair, variant)


def bracket_system(model: ModelSpec, pair, variant='bottom') -> BracketSystem:
    return _cached_system(_SystemKey(model, pair, variant))


def closed_form_leading(model: ModelSpec, pair, x, variant='bottom'):
    """
    Leading entry of each column.

    bottom: b^k_k = (G_1^{b1} - G_1^{b2}) prod_{i=2}^k a_{i,i-1} x_i
    top:    b^k_{n-k+1} = (G_n^{b1} - G_n^{b2}) prod_{i=n-k+1}^{n-1} (-a_{i,i+1} x_i)
    """
    t1, t2 = model.envs[pair[0]], model.envs[pair[1]]
    n = model.n
    lead = np.empty(n)
    if variant == 'bottom':
        value = t1.field(x)[0] - t2.field(x)[0]
        lead[0] = value
        for k in range(1, n):
            value *= t1.a_lower[k - 1] * x[k]
            lead[k] = value
    else:
        value = t1.field(x)[-1] - t2.field(x)[-1]
        lead[0] = value
        for k in range(1, n):
            i = n - 1 - k
            value *= -t1.a_upper[i] * x[i]
            lead[k] = value
    return lead


def _pair_admissible(model, pair, variant):
    """Pair differs at most in a_10 (bottom) or a_n0 (top)"""
    t1, t2 = model.envs[pair[0]], model.envs[pair[1]]
    keep = np.ones(model.n, dtype=bool)
    keep[0 if variant == 'bottom' else -1] = False
    return t1.same_interactions(t2) and np.array_equal(t1.a0[keep], t2.a0[keep])


def _leading_rows(n, variant):
    return list(range(n)) if variant == 'bottom' else [n - 1 - k for k in range(n)]


def _fd_jacobian(fn, x):
    """Central differences, step eps^(1/3) * max(1, |x_i|)"""
    n = x.size
    J = np.empty((n, n))
    for i in range(n):
        h = _FD_STEP * max(1.0, abs(x[i]))
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        J[:, i] = (fn(up) - fn(down)) / (up[i] - down[i])
    return J


def numeric_brackets(model: ModelSpec, system: BracketSystem, x):
    """Oracle: column k+1 = DG b^k - Db^k G with both Jacobians by finite differences"""
    table = model.envs[system.pair[0]]
    G = table.field(x)
    JG = _fd_jacobian(table.field, x)
    cols = [table.field(x) - model.envs[system.pair[1]].field(x)]
    for k in range(1, model.n):
        prev = system.column(k - 1, x)
        Jb = _fd_jacobian(lambda y, k=k: system.column(k - 1, y), x)
        cols.append(JG @ prev - Jb @ G)
    return np.column_stack(cols)


def _column_error(analytic, numeric):
    errors = []
    for k in range(analytic.shape[1]):
        scale = float(np.max(np.abs(analytic[:, k])))
        diff = float(np.max(np.abs(analytic[:, k] - numeric[:, k])))
        errors.append(diff / scale if scale > 0 else diff)
    return np.array(errors)


@dataclass(frozen=True, eq=False)
class BracketMatrix:
    matrix: np.ndarray
    x: np.ndarray
    pair: tuple
    variant: str
    leading: np.ndarray
    numeric: Optional[np.ndarray] = None
    column_errors: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.matrix.shape[0]

    def leading_rows(self):
        return _leading_rows(self.n, self.variant)

    def to_dict(self):
        data = {
            'x': self.x.tolist(),
            'pair': list(self.pair),
            'variant': self.variant,
            'matrix': self.matrix.tolist(),
            'leading': self.leading.tolist(),
            'column_norms': np.linalg.norm(self.matrix, axis=0).tolist(),
        }
        if self.column_errors is not None:
            data['numeric_column_errors'] = self.column_errors.tolist()
        return data


def hormander_brackets(model: ModelSpec, x, pair=None, variant='bottom', verify=True) -> BracketMatrix:
    """
    Bracket matrix [b^1 .. b^n] at x.

    The symbolic columns are checked against the closed-form leading entries
    and, with verify=True, against the finite-difference oracle.
    """
    x = _check_state(model, x).copy()
    if pair is None:
        pair = check_assumption_switch(model, variant)
    elif not _pair_admissible(model, pair, variant):
        raise AssumptionViolated(f"environments {tuple(pair)} differ outside a single growth/death rate",
                                 pair=list(pair), variant=variant)
    system = bracket_system(model, pair, variant)
    M = system.matrix(x)
    lead = closed_form_leading(model, pair, x, variant)

    for k, r in enumerate(_leading_rows(model.n, variant)):
        scale = max(abs(lead[k]), float(np.max(np.abs(M[:, k]))))
        if abs(M[r, k] - lead[k]) > CLOSED_FORM_RTOL * scale:
            raise OracleMismatch(f"b^{k + 1} leading entry {M[r, k]!r} vs closed form {lead[k]!r}",
                                 column=k, value=M[r, k], closed_form=lead[k])

    numeric = errors = None
    if verify:
        numeric = numeric_brackets(model, system, x)
        errors = _column_error(M, numeric)
        if np.any(errors > NUMERIC_RTOL):
            raise OracleMismatch(f"symbolic and finite-difference brackets disagree "
                                 f"(max rel error {errors.max():.2e})", errors=errors)
    return BracketMatrix(matrix=M, x=x, pair=tuple(pair), variant=variant,
                         leading=lead, numeric=numeric, column_errors=errors)


@dataclass(frozen=True, eq=False)
class HormanderResult:
    holds: bool
    det: float
    condition: float
    column_norms: np.ndarray
    brackets: Optional[BracketMatrix]
    reason: str = ''

    def to_dict(self):
        data = {
            'holds': self.holds,
            'det': self.det,
            'condition': self.condition if math.isfinite(self.condition) else None,
            'column_norms': self.column_norms.tolist(),
            'reason': self.reason,
        }
        if self.brackets is not None:
            data['brackets'] = self.brackets.to_dict()
        return data


def hormander_check(model: ModelSpec, x, pair=None, variant='bottom', tol_det=None) -> HormanderResult:
    """
    holds <=> |det| > tol_det * prod of column norms.

    A model without a qualifying pair yields holds=False with a zero matrix.
    """
    tol_det = Config.TOL_DET if tol_det is None else tol_det
    try:
        brackets = hormander_brackets(model, x, pair=pair, variant=variant)
    except AssumptionViolated as e:
        logger.warning(f"⚠️ Hörmander check skipped: {e}")
        return HormanderResult(holds=False, det=0.0, condition=math.inf,
                               column_norms=np.zeros(model.n), brackets=None, reason=str(e))

    M = brackets.matrix
    norms = np.linalg.norm(M, axis=0)
    det = float(np.linalg.det(M))
    scale = float(np.prod(norms))
    holds = bool(scale > 0 and abs(det) > tol_det * scale)
    condition = float(np.linalg.cond(M)) if holds else math.inf
    reason = '' if holds else 'bracket columns do not span R^n'
    logger.info(f"{'✅' if holds else '❌'} Hörmander at x={brackets.x.tolist()}: det={det:.3e}")
    return HormanderResult(holds=holds, det=det, condition=condition, column_norms=norms,
                           brackets=brackets, reason=reason)
