"""
`sensitivity`: perturbation bounds on q^{*k}_k and the next invasion rate.
"""
import logging

from ..errors import EpsilonTooLarge
from ..sensitivity import EXISTENCE_CAVEAT, perturbation_bounds, sign_stability_radius
from .common import add_config, classify_or_partial, emit, float_list, load_model, manifest_for

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser('sensitivity', parents=[parent],
                                   help='epsilon-bounds on the boundary equilibrium and lambda_{k+1}')
    add_config(parser)
    parser.add_argument('--epsilon', type=float_list, default=[0.1],
                        help='comma list of perturbation sizes (default: 0.1)')
    parser.add_argument('--k', type=int, default=None,
                        help='prefix length, 1..n (default: k* of the model)')
    parser.set_defaults(func=run)
    return parser


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'sensitivity')
    report, _ = classify_or_partial(model)
    k = report.k_star if args.k is None else args.k

    entries = []
    rejected = []
    for eps in args.epsilon:
        try:
            entries.append(perturbation_bounds(model, eps, k).to_dict())
        except EpsilonTooLarge as e:
            logger.warning(f"⚠️ {e}")
            rejected.append(e)
            entries.append({'epsilon': eps, 'k': k, 'error': e.to_dict()})
    if rejected and len(rejected) == len(args.epsilon):
        raise rejected[0]

    payload = {'k': k, 'bounds': entries, 'caveat': EXISTENCE_CAVEAT}
    summary = []
    if k < model.n:
        radius = sign_stability_radius(model, k)
        payload['sign_stability_radius'] = radius.to_dict()
        summary.append(f"lambda_{k + 1} = {radius.rate:+.6g}, sign stable up to epsilon {radius.radius:.6g}")
    for entry in entries:
        if 'error' in entry:
            summary.append(f"epsilon {entry['epsilon']}: {entry['error']['message']}")
        else:
            summary.append(f"epsilon {entry['epsilon']}: q_{k} in [{entry['f_lower']:.6g}, {entry['f_upper']:.6g}]")
    emit(args, 'sensitivity', payload, manifest, summary)
    return 0
