"""
`simulate`: one or more seeded paths, trajectory CSVs and an ensemble summary.
"""
import logging
import os

import numpy as np

from ..errors import UsageError
from ..models import invariant_ball
from ..occupation import invasion_rates_empirical, occupation
from ..simulator import check_invariant_ball, lyapunov_path, simulate_ensemble, write_trajectory_csv
from .common import (add_config, add_path_options, emit, initial_state, load_model, manifest_for,
                     out_dir, seed_of, sim_options)

logger = logging.getLogger(__name__)

CALIBRATION_NOTE = 'horizons and tolerances are empirical desk-scale calibrations'


def register(subparsers, parent):
    parser = subparsers.add_parser('simulate', parents=[parent],
                                   help='simulate the switched process and export trajectories')
    add_config(parser)
    add_path_options(parser)
    parser.add_argument('--trajectories', type=int, default=1, help='ensemble size m')
    parser.add_argument('--workers', type=int, default=None,
                        help='worker processes (default: FOODCHAIN_WORKERS)')
    parser.add_argument('--record-stride', type=int, default=None,
                        help='keep every k-th sample in the CSV (default: FOODCHAIN_RECORD_STRIDE)')
    parser.set_defaults(func=run)
    return parser


def summarize(traj, model, ball):
    """Per-path statistics: occupation, lambda_i(Pi_T), exponents, ball excess"""
    occ = occupation(traj)
    exponents = [lyapunov_path(traj, i).final if traj.x0[i] > 0 else None for i in range(model.n)]
    check = check_invariant_ball(traj, ball)
    return {
        'seed': traj.seed,
        'jumps': len(traj.jumps),
        'final_time': traj.final_time,
        'final_state': traj.final_state.tolist(),
        'occupation': occ.to_dict(),
        'invasion_rates': invasion_rates_empirical(occ, model).tolist(),
        'lyapunov': exponents,
        'ball_max_excess': check.max_excess,
        'ball_entry_time': check.entry_time,
    }


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'simulate')
    opts = sim_options(args)
    x0 = initial_state(args, model)
    seed = seed_of(args)
    stride = opts.record_stride
    if args.trajectories < 1:
        raise UsageError(f"--trajectories must be >= 1, got {args.trajectories}")

    trajectories = simulate_ensemble(model, x0, args.j0, opts, seed, args.trajectories,
                                     workers=args.workers)
    ball = invariant_ball(model)
    target = out_dir(args)
    os.makedirs(target, exist_ok=True)

    members = []
    for index, traj in enumerate(trajectories):
        csv_path = os.path.join(target, f'trajectory_{index:04d}.csv')
        write_trajectory_csv(traj, csv_path, stride=stride)
        members.append({'index': index, 'csv': os.path.basename(csv_path),
                        **summarize(traj, model, ball)})

    means = np.array([m['occupation']['mean'] for m in members])
    rates = np.array([m['invasion_rates'] for m in members])
    payload = {
        'members': members,
        'ensemble': {
            'size': len(members),
            'occupation_mean': means.mean(axis=0).tolist(),
            'invasion_rates_mean': rates.mean(axis=0).tolist(),
            'ball_max_excess': max(m['ball_max_excess'] for m in members),
        },
        'options': {'T': opts.T, 'rtol': opts.rtol, 'atol': opts.atol, 'dt_max': opts.dt_max,
                    'record_stride': stride},
        'calibration': CALIBRATION_NOTE,
    }
    summary = [f"Simulated {len(members)} path(s) to T = {opts.T}",
               f"Mean occupation: {payload['ensemble']['occupation_mean']}"]
    emit(args, 'simulate', payload, manifest, summary)
    return 0
