"""
Command-line entry point: `foodchain <command> [flags]`.

Exit codes: 0 ok, 1 usage, 2 validation, 3 numerical, 4 degenerate boundary.
"""
import argparse
import json
import logging
import sys

from . import __version__
from .commands import COMMANDS
from .commands.common import common_parser
from .config import Config
from .errors import FoodChainError, NumericalError, UsageError
from .tz_utils import UTCFormatter

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports bad flags as UsageError instead of exiting with 2"""
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = ArgumentParser(prog='foodchain',
                            description='Randomly switched Lotka-Volterra food chains')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='<command>', required=True)
    parent = common_parser()
    for module in COMMANDS:
        module.register(subparsers, parent)
    return parser


def configure_logging(quiet=False):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(UTCFormatter(LOG_FORMAT))
    level = logging.WARNING if quiet else getattr(logging, Config.LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level, handlers=[handler], force=True)


def _report_error(error, as_json):
    if as_json:
        print(json.dumps(error.to_dict(), sort_keys=True), file=sys.stderr)
    else:
        print(f"error: {error}", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        _report_error(e, as_json=False)
        return e.exit_code
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)

    configure_logging(args.quiet)
    try:
        return args.func(args)
    except FoodChainError as e:
        log = logger.warning if e.exit_code == 4 else logger.error
        log(f"❌ {args.command} failed: {type(e).__name__}: {e}")
        _report_error(e, args.json)
        return e.exit_code
    except Exception as e:
        logger.exception(f"❌ Unexpected error in {args.command}: {e}")
        _report_error(NumericalError(str(e)), args.json)
        return NumericalError.exit_code


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
