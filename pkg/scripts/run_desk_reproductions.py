#!/usr/bin/env python3
"""
Print the long desk-scale reproductions for manual inspection.

Usage:
    python scripts/run_desk_reproductions.py [--seeds N] [--t-persist T] [--t-extinct T]

Options:
    --seeds N        Seeds for the extinction-rate runs (default: 10)
    --t-persist T    Horizon of the persistence run (default: 1e4)
    --t-extinct T    Horizon of each extinction run (default: 5e3)
"""
import argparse
import logging
import os
import sys
import time

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from foodchain.environment import derive_seed
from foodchain.equilibria import classify
from foodchain.hormander import hormander_check
from foodchain.model_config import parse_config
from foodchain.occupation import occupation
from foodchain.sensitivity import perturbation_bounds
from foodchain.simulator import SimOptions, lyapunov_path, simulate

logging.basicConfig(level=logging.WARNING, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), '..', 'configs')


def load(name):
    return parse_config(os.path.join(CONFIG_DIR, f'{name}.json'))


def persistence(T):
    model = load('persistent_desk')
    report = classify(model)
    print(f"\n🚀 Persistent desk model, T = {T:g}")
    started = time.perf_counter()
    traj = simulate(model, [0.5, 0.5], 0, SimOptions(T=T), 11)
    occ = occupation(traj)
    elapsed = time.perf_counter() - started
    mean = occ.mean()
    error = np.abs(mean - report.q_star) / report.q_star
    print(f"   q*              = {report.q_star.tolist()}")
    print(f"   occupation mean = {mean.tolist()} (relative error {error.max():.3%})")
    print(f"   env mass        = {occ.env_mass.tolist()} vs nu {report.nu.tolist()}")
    for i in range(model.n):
        print(f"   exponent x{i + 1}    = {lyapunov_path(traj, i).final:+.5f}")
    print(f"   {len(traj.jumps)} jumps in {elapsed:.1f}s")
    return bool(error.max() < 0.02)


def extinction(T, seeds):
    model = load('extinct_desk')
    rate = classify(model).I_minus
    print(f"\n🚀 Extinct desk model, T = {T:g}, predicted rate {rate:+.4f}")
    measured = []
    for index in range(seeds):
        seed = derive_seed(2024, index)
        traj = simulate(model, [0.5, 0.5], 0, SimOptions(T=T), seed)
        measured.append(lyapunov_path(traj, 1).final)
        print(f"   seed {seed}: {measured[-1]:+.5f}")
    worst = max(abs(m - rate) for m in measured)
    print(f"   worst deviation {worst:.4f}")
    return worst < 0.02


def closed_forms():
    model = load('persistent_desk')
    print("\n📄 Closed forms on the persistent desk model")
    bounds = perturbation_bounds(model, 0.1, 1)
    print(f"   f_1(0.1) = {bounds.f_upper:.6f}, f_1(-0.1) = {bounds.f_lower:.6f}")
    check = hormander_check(model, classify(model).q_star)
    print(f"   bracket det at q* = {check.det:.6g} ({'holds' if check.holds else 'fails'})")
    return check.holds


def main():
    parser = argparse.ArgumentParser(description='Long desk-scale reproductions')
    parser.add_argument('--seeds', type=int, default=10)
    parser.add_argument('--t-persist', type=float, default=1e4)
    parser.add_argument('--t-extinct', type=float, default=5e3)
    args = parser.parse_args()

    results = {
        'closed forms': closed_forms(),
        'persistence': persistence(args.t_persist),
        'extinction rate': extinction(args.t_extinct, args.seeds),
    }
    print()
    for name, ok in results.items():
        print(f"{'✅' if ok else '❌'} {name}")
    return 0 if all(results.values()) else 1


if __name__ == '__main__':
    sys.exit(main())
