"""
`hormander`: Lie-bracket rank condition at a point.
"""
import argparse
import logging

import numpy as np

from ..errors import UsageError
from ..hormander import hormander_check
from .common import (add_config, classify_or_partial, emit, float_list, load_model, manifest_for,
                     parse_pair)

logger = logging.getLogger(__name__)

VARIANTS = ('bottom', 'top')


def _point(text):
    if text == 'q-star':
        return text
    try:
        return float_list(text)
    except argparse.ArgumentTypeError as e:
        raise argparse.ArgumentTypeError(f"--at takes 'q-star' or a comma list, got {text!r}") from e


def register(subparsers, parent):
    parser = subparsers.add_parser('hormander', parents=[parent],
                                   help='bracket matrix, determinant and condition number')
    add_config(parser)
    parser.add_argument('--at', type=_point, default='q-star',
                        help="evaluation point: 'q-star' (zero-padded) or a comma list")
    parser.add_argument('--variant', choices=VARIANTS, default='bottom')
    parser.add_argument('--pair', type=parse_pair, default=None,
                        help='switching pair j1,j2 (default: first qualifying pair)')
    parser.add_argument('--tol-det', type=float, default=None,
                        help='relative determinant threshold (default: FOODCHAIN_TOL_DET)')
    parser.set_defaults(func=run)
    return parser


def evaluation_point(args, model):
    if args.at != 'q-star':
        x = np.array(args.at, dtype=float)
        if x.size != model.n:
            raise UsageError(f"--at has {x.size} entries, the model has {model.n} species")
        return x
    report, _ = classify_or_partial(model)
    x = np.zeros(model.n)
    x[:report.q_star.size] = report.q_star
    return x


def run(args):
    model = load_model(args)
    manifest = manifest_for(args, 'hormander')
    x = evaluation_point(args, model)

    result = hormander_check(model, x, pair=args.pair, variant=args.variant, tol_det=args.tol_det)
    payload = {'x': x.tolist(), 'variant': args.variant, **result.to_dict()}
    summary = [f"Hörmander condition {'holds' if result.holds else 'fails'} at x = {x.tolist()}",
               f"det = {result.det:.6e}, cond = {result.condition:.6g}"]
    if result.reason:
        summary.append(result.reason)
    emit(args, 'hormander', payload, manifest, summary)
    return 0
