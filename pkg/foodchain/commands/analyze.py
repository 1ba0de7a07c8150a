"""
`analyze`: persistence verdict, equilibrium chain and extinction rates.
"""
import logging

from ..errors import FoodChainError
from ..invasion import env_favorability
from ..models import check_assumption_switch, invariant_ball
from .common import add_config, classify_or_partial, emit, load_model, manifest_for

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser('analyze', parents=[parent],
                                   help='classify persistence/extinction of the averaged chain')
    add_config(parser)
    parser.add_argument('--tol-zero', type=float, default=None,
                        help='relative zero band for delta^nu(k) (default: FOODCHAIN_TOL_ZERO)')
    parser.set_defaults(func=run)
    return parser


def _pair_or_none(model, variant):
    try:
        return list(check_assumption_switch(model, variant))
    except FoodChainError:
        return None


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'analyze')

    report, degenerate = classify_or_partial(model, tol_zero=args.tol_zero)

    ball = invariant_ball(model)
    payload = report.to_dict()
    payload.update({
        'model': model.to_dict(),
        'invariant_ball': {'weights': ball.weights.tolist(), 'R': ball.R,
                           'eps_min': ball.eps_min, 'gamma': ball.gamma, 'bound': ball.bound},
        'switching_pair': {'bottom': _pair_or_none(model, 'bottom'),
                           'top': _pair_or_none(model, 'top')},
        'favourability': env_favorability(model).to_dict(),
    })

    summary = [f"Verdict: {report.verdict.value} (k* = {report.k_star} of {model.n})",
               f"q* = {report.q_star.tolist()}"]
    if report.I_minus is not None:
        summary.append(f"I^-_{report.k_star + 1} = {report.I_minus:.6g}")
    emit(args, 'analyze', payload, manifest, summary)

    if degenerate is not None:
        raise degenerate
    return 0
