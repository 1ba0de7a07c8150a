"""
`verify`: run the oracle cross-checks on a model file or on random models.
"""
import logging

from ..errors import UsageError
from ..verification import exit_code, verify_model, verify_random_models
from .common import add_config, add_seed, emit, load_model, manifest_for, seed_of

logger = logging.getLogger(__name__)


def register(subparsers, parent):
    parser = subparsers.add_parser('verify', parents=[parent],
                                   help='cross-check closed forms against independent oracles')
    add_config(parser, required=False)
    parser.add_argument('--random', type=int, default=None, metavar='M',
                        help='verify M seeded random strict models instead of --config')
    parser.add_argument('--n-max', type=int, default=4, help='largest chain length for --random')
    parser.add_argument('--horizon', type=float, default=None,
                        help='path-check horizon (default: 20 for --config, 5 for --random)')
    parser.add_argument('--points', type=int, default=None,
                        help='random points for the bracket check')
    add_seed(parser)
    parser.set_defaults(func=run)
    return parser


def run(args):
    if (args.config is None) == (args.random is None):
        raise UsageError("verify takes exactly one of --config or --random M")
    manifest = manifest_for(args, 'verify')
    seed = seed_of(args)

    if args.random is not None:
        if args.random < 1:
            raise UsageError(f"--random must be >= 1, got {args.random}")
        results = verify_random_models(args.random, seed, n_max=args.n_max,
                                       horizon=args.horizon or 5.0, points=args.points or 2)
        passed = sum(r['success'] for r in results)
        summary = [f"{passed}/{len(results)} random models passed every check"]
        summary += [f"model {r['index']} (n = {r['n']}, seed {r['seed']}): "
                    + ', '.join(c['check'] for c in r['checks'] if not c['success'])
                    for r in results if not r['success']]
    else:
        results = verify_model(load_model(args), seed, horizon=args.horizon or 20.0,
                               points=args.points or 5)
        summary = [f"{'ok  ' if r['success'] else 'FAIL'} {r['check']}"
                   + ('' if r['success'] else f": {r['error']}") for r in results]

    code = exit_code(results)
    emit(args, 'verify', {'results': results, 'exit_code': code}, manifest, summary)
    return code
