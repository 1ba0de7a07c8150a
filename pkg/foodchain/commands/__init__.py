"""
Subcommands. Each module exposes register(subparsers, parent) and run(args).
"""
from . import analyze, hormander, lyapunov, occupation, sensitivity, simulate, verify

COMMANDS = (analyze, simulate, occupation, lyapunov, sensitivity, hormander, verify)
