"""
Oracle cross-check suite.

Each check returns a result dict in the usual shape:
{'check': name, 'success': bool, ...details} or, on failure,
{'check': name, 'success': False, 'error': message, 'error_type': ..., 'exit_code': ...}.
"""
import logging

import numpy as np

from .equilibria import MAX_ENUMERATION, continuant, delta, equilibrium, classify
from .environment import derive_seed, stationary_distribution
from .errors import DegenerateBoundary, EpsilonTooLarge, FoodChainError, OracleMismatch
from .hormander import hormander_brackets
from .invasion import env_favorability, invasion_rate_boundary
from .models import ModelSpec, average_table, check_assumption_switch, invariant_ball
from .occupation import occupation, path_identity_residual
from .random_models import generator, random_model
from .sensitivity import perturbation_bounds
from .simulator import SimOptions, check_invariant_ball, simulate

logger = logging.getLogger(__name__)

PATH_IDENTITY_TOL = 1e-5
SENSITIVITY_EPSILONS = (0.2, 0.1, 0.05, 0.01)


def _run(name, fn):
    try:
        detail = fn() or {}
        return {'check': name, 'success': True, **detail}
    except FoodChainError as e:
        logger.error(f"❌ {name}: {e}")
        return {'check': name, 'success': False, 'error': str(e),
                'error_type': type(e).__name__, 'exit_code': e.exit_code}


def _stationary(model):
    nu = stationary_distribution(model.b)
    residual = float(np.max(np.abs(nu @ model.generator)))
    return {'nu': nu.tolist(), 'residual': residual}


def _algebra(model):
    nu = stationary_distribution(model.b)
    tables = list(model.envs) + [average_table(model, nu)]
    n = model.n
    for table in tables:
        for k in range(0, min(n, MAX_ENUMERATION) + 1):
            continuant(table, k, verify=True)
        for k in range(1, min(n, MAX_ENUMERATION + 1) + 1):
            delta(table, k, verify=True)
        for k in range(1, n + 1):
            equilibrium(table, k)
    return {'tables': len(tables), 'k_max': n}


def _classification(model):
    report = classify(model)
    rates = [invasion_rate_boundary(model, k).to_dict()
             for k in range(0, min(report.k_star + 1, model.n))]
    return {'verdict': report.verdict.value, 'k_star': report.k_star, 'boundary_rates': rates}


def _favorability(model):
    fav = env_favorability(model)
    return {'favourable_prefix': fav.prefix, 'identity_checks': len(fav.identity)}


def _brackets(model, seed, points):
    try:
        pair = check_assumption_switch(model)
    except FoodChainError as e:
        return {'skipped': str(e)}
    gen = generator(derive_seed(seed, 1))
    worst = 0.0
    for _ in range(points):
        x = gen.uniform(0.5, 2.0, size=model.n)
        bm = hormander_brackets(model, x, pair=pair, verify=True)
        below = np.tril(bm.matrix, -1)
        if np.any(below != 0):
            raise OracleMismatch("bracket matrix has entries below the diagonal")
        worst = max(worst, float(bm.column_errors.max()))
    return {'pair': list(pair), 'points': points, 'max_relative_error': worst}


def _sensitivity(model):
    try:
        k_max = classify(model).k_star
    except DegenerateBoundary as e:
        k_max = e.report.k_star if e.report is not None else 0
    checked = 0
    for k in range(1, k_max + 1):
        for eps in SENSITIVITY_EPSILONS:
            try:
                perturbation_bounds(model, eps, k)
                checked += 1
            except EpsilonTooLarge:
                continue
    return {'bounds_checked': checked}


def _path(model, seed, horizon):
    x0 = np.full(model.n, 0.5)
    traj = simulate(model, x0, 0, SimOptions(T=horizon, rtol=1e-8, atol=1e-10), seed)
    occ = occupation(traj)
    residuals = [path_identity_residual(traj, model, i, occ) for i in range(model.n)]
    worst = max(residuals)
    if worst > PATH_IDENTITY_TOL:
        raise OracleMismatch(f"path identity residual {worst:.3e} exceeds {PATH_IDENTITY_TOL}",
                             residuals=residuals)
    ball = check_invariant_ball(traj, invariant_ball(model), atol=1e-8)
    if not ball.ok:
        raise OracleMismatch(f"path leaves the invariant region by {ball.max_excess:.3e}")
    return {'residuals': residuals, 'ball_excess': ball.max_excess,
            'mass': occ.total_mass, 'jumps': len(traj.jumps)}


def verify_model(model: ModelSpec, seed, horizon=20.0, points=5):
    """Run every oracle on one model; returns the list of result dicts"""
    results = [
        _run('stationary_distribution', lambda: _stationary(model)),
        _run('continuant_delta_equilibrium', lambda: _algebra(model)),
        _run('classification', lambda: _classification(model)),
        _run('favourability', lambda: _favorability(model)),
        _run('brackets_analytic_vs_numeric', lambda: _brackets(model, seed, points)),
        _run('sensitivity_sandwich', lambda: _sensitivity(model)),
        _run('path_identity', lambda: _path(model, seed, horizon)),
    ]
    passed = sum(r['success'] for r in results)
    logger.info(f"{'✅' if passed == len(results) else '⚠️'} {passed}/{len(results)} checks passed for {model!r}")
    return results


def verify_random_models(count, seed, n_max=4, horizon=5.0, points=2):
    """verify_model over `count` seeded random strict models with 1 <= n <= n_max"""
    results = []
    for index in range(count):
        member_seed = derive_seed(seed, index)
        gen = generator(member_seed)
        n = int(gen.integers(1, n_max + 1))
        model = random_model(gen, n)
        checks = verify_model(model, member_seed, horizon=horizon, points=points)
        results.append({'index': index, 'seed': member_seed, 'n': n,
                        'success': all(c['success'] for c in checks), 'checks': checks})
    return results


def exit_code(results):
    """0 when every check passed, else the exit code of the first failure"""
    for r in results:
        if 'checks' in r:
            code = exit_code(r['checks'])
            if code:
                return code
        elif not r['success']:
            return r.get('exit_code', 3)
    return 0
