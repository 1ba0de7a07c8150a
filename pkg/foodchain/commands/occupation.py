"""
`occupation`: empirical occupation measure of one path against its predictions.
"""
import logging

import numpy as np

from ..environment import stationary_distribution
from ..occupation import (boundary_support, generator_time_average, invasion_rates_empirical,
                          occupation)
from ..simulator import simulate
from .common import (add_config, add_path_options, classify_or_partial, emit, initial_state,
                     load_model, manifest_for, seed_of, sim_options)

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser('occupation', parents=[parent],
                                   help='occupation measure, invasion rates and generator averages')
    add_config(parser)
    add_path_options(parser)
    parser.add_argument('--bins', type=int, default=50, help='histogram bins per species')
    parser.set_defaults(func=run)
    return parser


def _coordinate(i):
    def g(x, j):
        return float(x[i])

    def grad(x, j):
        e = np.zeros_like(x)
        e[i] = 1.0
        return e
    return g, grad


def _indicator(env):
    def g(x, j):
        return 1.0 if j == env else 0.0

    def grad(x, j):
        return np.zeros_like(x)
    return g, grad


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'occupation')
    opts = sim_options(args)
    x0 = initial_state(args, model)

    traj = simulate(model, x0, args.j0, opts, seed_of(args))
    occ = occupation(traj)
    nu = stationary_distribution(model.b)
    report, _ = classify_or_partial(model)
    support, is_prefix = boundary_support(occ)

    generator_checks = {
        'x1': generator_time_average(occ, model, *_coordinate(0)),
        'env0_indicator': generator_time_average(occ, model, *_indicator(0)),
    }
    histograms = []
    for i in range(model.n):
        counts, edges = occ.histogram(i, bins=args.bins)
        histograms.append({'species': i, 'weights': counts.tolist(), 'edges': edges.tolist()})

    payload = {
        'occupation': occ.to_dict(),
        'nu': nu.tolist(),
        'q_star': report.q_star.tolist(),
        'verdict': report.verdict.value,
        'invasion_rates': invasion_rates_empirical(occ, model).tolist(),
        'generator_time_average': generator_checks,
        'generator_tolerance': 3.0 / np.sqrt(opts.T),
        'support': list(support),
        'support_is_prefix': is_prefix,
        'histograms': histograms,
        'T': opts.T,
        'jumps': len(traj.jumps),
    }
    summary = [f"Environment mass {occ.env_mass.tolist()} vs nu {nu.tolist()}",
               f"Mean state {occ.mean().tolist()} (q* = {report.q_star.tolist()})"]
    emit(args, 'occupation', payload, manifest, summary)
    return 0
