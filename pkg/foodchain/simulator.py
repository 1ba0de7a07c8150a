"""
Simulation of the switched process Z(t) = (X(t), J(t)).

Between jumps the food-chain ODE of the current environment is integrated in
original coordinates with the Dormand-Prince pair; jump times are drawn in
advance and every segment ends exactly on its jump time.

Each species is stored as a mantissa times exp(offset). Once a mantissa
drops below RENORM_THRESHOLD it is folded into the offset, so ln X_i(t)
stays finite for species that decay far below double range while X_i itself
underflows to zero as usual. A renormalised species is error-controlled
relative to its own size. Faces x_i = 0 stay exactly zero.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import Config
from .environment import RNG_ALGORITHM, RngState, derive_seed, sample_jump, stationary_distribution
from .errors import DomainError, NegativeStateOverflow, StepSizeUnderflow
from .integrator import DormandPrince54, hermite_midpoint
from .models import InvariantBall, ModelSpec, _check_state, average_table

logger = logging.getLogger(__name__)

RENORM_THRESHOLD = 1e-2
UNDERFLOW_FRACTION = 1e-14


@dataclass(frozen=True)
class SimOptions:
    T: float
    rtol: float = field(default_factory=lambda: Config.RTOL)
    atol: float = field(default_factory=lambda: Config.ATOL)
    dt_max: Optional[float] = field(default_factory=lambda: Config.DT_MAX)
    record_stride: int = field(default_factory=lambda: Config.RECORD_STRIDE)
    # |h F_i| bound applied on every step
    growth_step: float = 0.1

    def __post_init__(self):
        for name in ('T', 'rtol', 'atol', 'growth_step'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass(frozen=True, eq=False)
class Segment:
    """Constant-environment piece: samples at accepted steps plus step midpoints"""
    t_start: float
    env: int
    times: np.ndarray       # (m+1,)
    states: np.ndarray      # (m+1, n)
    log_states: np.ndarray  # (m+1, n), -inf on faces
    midpoints: np.ndarray   # (m, n)

    @property
    def t_end(self):
        return float(self.times[-1])

    @property
    def steps(self):
        return np.diff(self.times)


@dataclass(eq=False)
class Trajectory:
    segments: list
    jumps: list
    x0: np.ndarray
    j0: int
    T: float
    seed: Optional[int] = None
    rng_algorithm: str = RNG_ALGORITHM
    evaluations: int = 0
    N: int = 1

    @property
    def n(self):
        return self.x0.size

    @property
    def final_time(self):
        return self.segments[-1].t_end

    @property
    def final_state(self):
        return self.segments[-1].states[-1]

    @property
    def final_log_state(self):
        return self.segments[-1].log_states[-1]

    def samples(self, stride=1):
        """
        (t, env, x, log x) over the whole path with strictly increasing t.
        The sample at a jump time is reported once, under the new environment.
        """
        ts, envs, xs, logs = [], [], [], []
        last = len(self.segments) - 1
        for idx, seg in enumerate(self.segments):
            stop = None if idx == last else -1
            ts.append(seg.times[:stop])
            xs.append(seg.states[:stop])
            logs.append(seg.log_states[:stop])
            envs.append(np.full(ts[-1].size, seg.env))
        t = np.concatenate(ts)
        keep = np.arange(0, t.size, stride)
        if keep[-1] != t.size - 1:
            keep = np.append(keep, t.size - 1)
        return t[keep], np.concatenate(envs)[keep], np.vstack(xs)[keep], np.vstack(logs)[keep]

    def __repr__(self):
        return (f'<Trajectory T={self.T} segments={len(self.segments)} '
                f'jumps={len(self.jumps)} seed={self.seed}>')


def _integrate_segment(table, m, offsets, t0, t1, opts, h, horizon):
    """
    Integrate one environment from t0 to exactly t1.

    m and offsets are updated in place. Returns (segment arrays, next h, evaluations).
    """
    exp_s = np.exp(offsets)

    def rhs(mm):
        return mm * table.growth(mm * exp_s)

    stepper = DormandPrince54(rhs, opts.rtol, opts.atol)
    f = rhs(m)

    def log_state():
        with np.errstate(divide='ignore'):
            return np.log(m) + offsets

    times, states, logs, mids = [t0], [m * exp_s], [log_state()], []
    t = t0
    if h is None or h <= 0:
        h = stepper.initial_step(m, f, t1 - t0)

    while t < t1:
        x = m * exp_s
        rates = np.abs(table.growth(x))[m != 0]
        cap = opts.growth_step / max(float(rates.max()) if rates.size else 0.0, 1e-300)
        if opts.dt_max is not None:
            cap = min(cap, opts.dt_max)
        h_try = min(h, cap)
        last = t + h_try >= t1
        if last:
            h_try = t1 - t
        elif h_try < UNDERFLOW_FRACTION * horizon:
            raise StepSizeUnderflow(f"step {h_try:.3e} below {UNDERFLOW_FRACTION}*T at t={t}",
                                    t=t, state=x)

        m_new, f_new, err = stepper.attempt(m, f, h_try)
        if not (err <= 1.0 and np.all(np.isfinite(m_new))):
            h = stepper.next_step(h_try, err if math.isfinite(err) else 1e10, accepted=False)
            continue
        if np.any(m_new < -opts.atol):
            raise NegativeStateOverflow(f"negative component after step at t={t + h_try}",
                                        t=t + h_try, state=m_new * exp_s)

        mids.append(hermite_midpoint(m, m_new, f, f_new, h_try) * exp_s)
        h_next = stepper.next_step(h_try, err, accepted=True)
        if not last:
            h = h_next
        t = t1 if last else t + h_try
        m[:] = m_new
        f = f_new.copy()

        tiny = (m > 0) & (m < RENORM_THRESHOLD)
        if tiny.any():
            scale = m[tiny]
            offsets[tiny] += np.log(scale)
            f[tiny] /= scale
            m[tiny] = 1.0
            exp_s = np.exp(offsets)

        times.append(t)
        states.append(m * exp_s)
        logs.append(log_state())

    n = m.size
    arrays = (np.array(times), np.array(states).reshape(-1, n),
              np.array(logs).reshape(-1, n), np.array(mids).reshape(-1, n))
    return arrays, h, stepper.evaluations


def simulate(model: ModelSpec, x0, j0: int, opts: SimOptions, rng) -> Trajectory:
    """
    One path of the switched food chain on [0, opts.T].

    `rng` is an RngState or an integer seed. The environment jumps at
    exponential times drawn up front; the integrator lands on each exactly.
    """
    if not isinstance(rng, RngState):
        rng = RngState(rng)
    x0 = _check_state(model, x0).copy()
    if not 0 <= j0 < model.N:
        raise DomainError(f"initial environment {j0} outside 0..{model.N - 1}")

    m = x0.copy()
    offsets = np.zeros(model.n)
    env = j0
    t = 0.0
    h = None
    holding, nxt = sample_jump(rng, env, model.b)
    t_jump = holding
    segments, jumps = [], []
    evaluations = 0

    while True:
        t_end = min(t_jump, opts.T)
        arrays, h, evals = _integrate_segment(model.envs[env], m, offsets, t, t_end, opts, h, opts.T)
        evaluations += evals
        segments.append(Segment(t, env, *arrays))
        t = t_end
        if t >= opts.T:
            break
        jumps.append(t_jump)
        env = nxt
        holding, nxt = sample_jump(rng, env, model.b)
        t_jump = t + holding

    traj = Trajectory(segments=segments, jumps=jumps, x0=x0, j0=j0, T=opts.T,
                      seed=rng.seed, evaluations=evaluations, N=model.N)
    logger.debug(f"Simulated {traj!r} with {evaluations} field evaluations")
    return traj


def _ensemble_member(args):
    model, x0, j0, opts, seed = args
    return simulate(model, x0, j0, opts, RngState(seed))


def simulate_ensemble(model: ModelSpec, x0, j0, opts: SimOptions, seed, count, workers=None):
    """
    `count` independent paths; member i uses derive_seed(seed, i).
    Results come back in member order whatever the worker count.
    """
    workers = Config.WORKERS if workers is None else workers
    jobs = [(model, np.asarray(x0, dtype=float), j0, opts, derive_seed(seed, i)) for i in range(count)]
    logger.info(f"🚀 Simulating {count} trajectories on {workers} worker(s), T={opts.T}")
    if workers <= 1 or count <= 1:
        return [_ensemble_member(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_ensemble_member, jobs))


def averaged_flow(model: ModelSpec, x0, opts: SimOptions) -> Segment:
    """Deterministic flow of the averaged field G^nu on [0, opts.T]"""
    table = average_table(model, stationary_distribution(model.b))
    x0 = _check_state(model, x0)
    arrays, _, _ = _integrate_segment(table, x0.copy(), np.zeros(model.n), 0.0, opts.T,
                                      opts, None, opts.T)
    return Segment(0.0, -1, *arrays)


@dataclass(frozen=True)
class LyapunovSeries:
    times: np.ndarray
    exponents: np.ndarray

    @property
    def final(self):
        return float(self.exponents[-1])


def lyapunov_path(traj: Trajectory, i: int) -> LyapunovSeries:
    """Running exponent ln X_i(t) / t; the last value estimates the growth/extinction rate"""
    if not traj.x0[i] > 0:
        raise DomainError(f"species {i} starts on its invariant face x_{i + 1} = 0", species=i)
    t, _, _, logs = traj.samples()
    keep = t > 0
    return LyapunovSeries(times=t[keep], exponents=logs[keep, i] / t[keep])


@dataclass(frozen=True)
class BallCheck:
    ok: bool
    max_excess: float
    entry_time: Optional[float]
    stays_inside: bool


def check_invariant_ball(traj: Trajectory, ball: InvariantBall, atol=None) -> BallCheck:
    """
    S(X(t)) <= max(S(X(0)), bound) + atol at every sample; also reports when
    the path first enters B and whether it ever leaves again.
    """
    atol = Config.ATOL if atol is None else atol
    t, _, x, _ = traj.samples()
    S = ball.level(x)
    limit = max(float(S[0]), ball.bound)
    excess = float(np.max(S - limit))
    inside = S <= ball.bound + atol
    entry = int(np.argmax(inside)) if inside.any() else None
    stays = entry is not None and bool(np.all(inside[entry:]))
    return BallCheck(ok=excess <= atol, max_excess=max(excess, 0.0),
                     entry_time=None if entry is None else float(t[entry]),
                     stays_inside=stays)


def write_trajectory_csv(traj: Trajectory, path, stride=1):
    """Columns t, env, x1..xn with %.17g formatting"""
    t, env, x, _ = traj.samples(stride)
    header = ','.join(['t', 'env'] + [f'x{i + 1}' for i in range(traj.n)])
    data = np.column_stack([t, env, x])
    np.savetxt(path, data, delimiter=',', header=header, comments='', fmt='%.17g')
    return path
