"""
Flags and helpers shared by every subcommand.
"""
import argparse
import logging

import numpy as np

from ..config import Config
from ..errors import DegenerateBoundary, DomainError, UsageError
from ..equilibria import classify
from ..model_config import config_digest, parse_config
from ..reports import RunManifest, dumps, write_report
from ..simulator import SimOptions

logger = logging.getLogger(__name__)


def common_parser():
    """Parent parser carrying --out/--quiet/--json"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--out', default=None,
                        help=f'output directory (default: FOODCHAIN_OUT_DIR or {Config.OUT_DIR})')
    parent.add_argument('--quiet', action='store_true', help='only log warnings and errors')
    parent.add_argument('--json', action='store_true', help='print the JSON report to stdout')
    return parent


def add_config(parser, required=True):
    parser.add_argument('--config', required=required, help='model JSON file')


def seed_value(text):
    try:
        seed = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from e
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def add_seed(parser):
    parser.add_argument('--seed', type=seed_value, default=None,
                        help='64-bit seed (default: FOODCHAIN_SEED)')


def add_path_options(parser, t_default=None):
    """Initial condition and integrator flags used by every path-based command"""
    parser.add_argument('--x0', type=float_list, default=None,
                        help='initial state as a comma list (default: 0.5 for every species)')
    parser.add_argument('--j0', type=int, default=0, help='initial environment (0-based)')
    parser.add_argument('--t-max', type=float, default=t_default,
                        help='horizon T (default: FOODCHAIN_T_MAX)')
    parser.add_argument('--rtol', type=float, default=None)
    parser.add_argument('--atol', type=float, default=None)
    parser.add_argument('--dt-max', type=float, default=None)
    add_seed(parser)


def float_list(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, got {text!r}") from e


def load_model(args):
    return parse_config(args.config)


def initial_state(args, model):
    if args.x0 is None:
        return np.full(model.n, 0.5)
    x0 = np.array(args.x0, dtype=float)
    if x0.size != model.n:
        raise UsageError(f"--x0 has {x0.size} entries, the model has {model.n} species")
    return x0


def sim_options(args):
    kwargs = {'T': args.t_max if args.t_max is not None else Config.T_MAX}
    for flag in ('rtol', 'atol', 'dt_max', 'record_stride'):
        value = getattr(args, flag, None)
        if value is not None:
            kwargs[flag] = value
    try:
        return SimOptions(**kwargs)
    except ValueError as e:
        raise UsageError(str(e)) from e


def seed_of(args):
    return Config.SEED if getattr(args, 'seed', None) is None else args.seed


def classify_or_partial(model, tol_zero=None):
    """Classification report, falling back to the partial report of a degenerate model"""
    try:
        return classify(model, tol_zero=tol_zero), None
    except DegenerateBoundary as e:
        if e.report is None:
            raise
        return e.report, e


def manifest_for(args, command):
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ('func', 'command')}
    config = getattr(args, 'config', None)
    return RunManifest(
        command=command,
        flags=flags,
        config_path=config,
        config_sha256=config_digest(config) if config else None,
        seed=seed_of(args) if hasattr(args, 'seed') else None,
    )


def out_dir(args):
    return args.out or Config.OUT_DIR


def emit(args, name, payload, manifest, summary=()):
    """Write <out>/<name>.json; print it with --json, else the summary lines"""
    manifest.finish()
    path = write_report(out_dir(args), name, payload, manifest)
    if args.json:
        print(dumps({**payload, 'manifest': manifest.to_dict()}), end='')
    else:
        for line in summary:
            print(line)
        print(f"Report: {path}")
    return path


def parse_pair(text):
    values = [int(v) for v in text.split(',')]
    if len(values) != 2:
        raise argparse.ArgumentTypeError("--pair takes two environment indices, e.g. 0,1")
    return tuple(values)


def require_positive_species(x0, i):
    if not x0[i] > 0:
        raise DomainError(f"species {i} starts at 0; its exponent is undefined", species=i)
