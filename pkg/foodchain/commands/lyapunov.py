"""
`lyapunov`: measured exponents ln X_i(T)/T against the predicted rates.
"""
import logging

import numpy as np

from ..errors import UsageError
from ..occupation import occupation, path_identity_residual
from ..simulator import lyapunov_path, simulate_ensemble
from .common import (add_config, add_path_options, classify_or_partial, emit, initial_state,
                     load_model, manifest_for, require_positive_species, seed_of, sim_options)

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser('lyapunov', parents=[parent],
                                   help='pathwise exponents and the log-growth identity')
    add_config(parser)
    add_path_options(parser)
    parser.add_argument('--species', type=int, action='append', default=None,
                        help='species index (0-based); repeat for several, default all with x0 > 0')
    parser.add_argument('--trajectories', type=int, default=1)
    parser.add_argument('--workers', type=int, default=None)
    parser.set_defaults(func=run)
    return parser


def predicted_rates(report, n):
    """0 for the persisting prefix, the extinction rates above it"""
    rates = np.zeros(n)
    tail = report.extinction_rates[:n - report.k_star]
    rates[report.k_star:report.k_star + tail.size] = tail
    return rates


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'lyapunov')
    opts = sim_options(args)
    x0 = initial_state(args, model)
    species = args.species if args.species else [i for i in range(model.n) if x0[i] > 0]
    for i in species:
        if not 0 <= i < model.n:
            raise UsageError(f"--species {i} outside 0..{model.n - 1}")
        require_positive_species(x0, i)

    report, _ = classify_or_partial(model)
    predicted = predicted_rates(report, model.n)
    trajectories = simulate_ensemble(model, x0, args.j0, opts, seed_of(args), args.trajectories,
                                     workers=args.workers)

    rows = []
    for index, traj in enumerate(trajectories):
        occ = occupation(traj)
        for i in species:
            measured = lyapunov_path(traj, i).final
            rows.append({
                'trajectory': index,
                'seed': traj.seed,
                'species': i,
                'measured': measured,
                'predicted': float(predicted[i]),
                'difference': measured - float(predicted[i]),
                'path_identity_residual': path_identity_residual(traj, model, i, occ),
            })

    payload = {'verdict': report.verdict.value, 'k_star': report.k_star,
               'predicted': predicted.tolist(), 'exponents': rows, 'T': opts.T}
    summary = [f"species {r['species'] + 1}: measured {r['measured']:+.4f}, predicted {r['predicted']:+.4f}"
               for r in rows]
    emit(args, 'lyapunov', payload, manifest, summary)
    return 0
