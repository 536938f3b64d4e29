"""Monte Carlo wave-function engine: stochastic quantum-jump trajectories.

Each time step of size dt either applies the exact no-jump propagator
exp(-i H_nh dt) followed by renormalization, or collapses the state through
one of the four jump channels.  The jump test is first order in dt: channel
k fires with probability dt * rate_k * |psi[from_k]|^2.  One uniform random
number is drawn per step; it decides both whether a jump happens and which
channel fires (the channel probabilities partition [0, dp)).

Trajectories are deterministic given (params, config): the per-trajectory
random stream is PCG64 seeded with the config seed, and ensembles derive
per-trajectory seeds from a base seed with a counter-based splitting rule
(see :func:`derive_seed`), so results are independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit
from scipy.linalg import expm

from .errors import StepSizeTooLargeError
from .hamiltonian import CHANNEL_LABELS, build_h_nh, jump_channels
from .scheme import SchemeParams, departure_rates

#: Hard cap on the per-step total jump probability.
MAX_JUMP_PROBABILITY = 0.1

#: Required margin between dt and the fastest departure rate.
DT_RATE_MARGIN = 0.01

#: Default burn-in discarded before steady-state statistics, in 1/gamma_21.
DEFAULT_BURN_IN = 50.0


@dataclass(frozen=True)
class TrajectoryConfig:
    """Stepping, horizon, seed and initial level of one stochastic run.

    Times are in the inverse unit of the SchemeParams rates (1/gamma_21 when
    parameters are in gamma_21 units).  dt must satisfy
    dt <= 0.01 / max(departure rate); this is checked against the actual
    parameters in :func:`run_trajectory`.
    """

    dt: float
    t_max: float
    seed: int
    initial_level: int = 2

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.t_max < self.dt:
            raise ValueError("t_max must be at least dt")
        if self.initial_level not in (1, 2, 3, 4):
            raise ValueError("initial_level must be in 1..4")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class JumpEvent:
    """One recorded quantum jump: when it fired, through which channel, where it landed."""

    time: float
    channel: str
    post_level: int


@dataclass(frozen=True)
class Trajectory:
    """One stochastic history: configuration, jumps, final state, step counts."""

    config: TrajectoryConfig
    events: tuple[JumpEvent, ...]
    final_state: np.ndarray
    coherent_steps: int


def derive_seed(base_seed: int, index: int) -> int:
    """Per-trajectory seed for ensemble member ``index`` (counter-based, order-free)."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


def no_jump_propagator(p: SchemeParams, dt: float) -> np.ndarray:
    """Exact matrix exponential exp(-i H_nh dt) of the no-jump generator."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    return expm(-1j * build_h_nh(p) * dt)


def basis_vector(level: int) -> np.ndarray:
    psi = np.zeros(4, dtype=np.complex128)
    psi[level - 1] = 1.0
    return psi


def step(psi: np.ndarray, propagator: np.ndarray, p: SchemeParams, dt: float,
         rng: np.random.Generator) -> tuple[np.ndarray, JumpEvent | None]:
    """Advance one dt: jump test, then collapse or propagate-and-renormalize.

    Draws exactly one uniform r.  The total jump probability is
    dp = sum_k dt * rate_k * |psi[from_k]|^2; if r < dp the channel whose
    sub-interval contains r fires (probability proportional to its term) and
    psi collapses onto the channel's target level.  Otherwise the propagator
    is applied and the state renormalized.
    """
    chans = jump_channels(p)
    probs = [dt * ch.rate * abs(psi[ch.from_level - 1]) ** 2 for ch in chans]
    dp = sum(probs)
    if dp > MAX_JUMP_PROBABILITY:
        raise StepSizeTooLargeError(
            f"per-step jump probability {dp:.3g} exceeds {MAX_JUMP_PROBABILITY}; reduce dt")
    r = rng.random()
    if r < dp:
        acc = 0.0
        for ch, prob in zip(chans, probs):
            acc += prob
            if r < acc:
                # event time is relative to the step; run_trajectory assigns
                # absolute times
                return basis_vector(ch.to_level), JumpEvent(0.0, ch.label, ch.to_level)
        # unreachable: acc == dp > r on the last channel
        raise AssertionError("jump channel selection fell through")
    out = propagator @ psi
    out /= np.linalg.norm(out)
    return out, None


@njit(cache=True)
def _trajectory_kernel(psi, prop, from_idx, to_idx, rates, dt, n_steps, uniforms,
                       sample_every, pops_out):  # pragma: no cover - compiled
    """Tight loop over steps.

    Returns (status, n_events, jump_steps, jump_channels, coherent_steps).
    status 0 = ok, 1 = per-step jump probability exceeded the cap at step
    ``n_events`` (abused as the failing step index in that case).
    pops_out rows are |psi_i|^2 sampled every ``sample_every`` steps (state
    before the step), when sample_every > 0.
    """
    cap = 1024
    jump_steps = np.empty(cap, dtype=np.int64)
    jump_chans = np.empty(cap, dtype=np.int64)
    n_events = 0
    coherent = 0
    sample_row = 0
    for s in range(n_steps):
        if sample_every > 0 and s % sample_every == 0:
            for m in range(4):
                pops_out[sample_row, m] = psi[m].real ** 2 + psi[m].imag ** 2
            sample_row += 1
        dp0 = dt * rates[0] * (psi[from_idx[0]].real ** 2 + psi[from_idx[0]].imag ** 2)
        dp1 = dt * rates[1] * (psi[from_idx[1]].real ** 2 + psi[from_idx[1]].imag ** 2)
        dp2 = dt * rates[2] * (psi[from_idx[2]].real ** 2 + psi[from_idx[2]].imag ** 2)
        dp3 = dt * rates[3] * (psi[from_idx[3]].real ** 2 + psi[from_idx[3]].imag ** 2)
        dp = dp0 + dp1 + dp2 + dp3
        if dp > 0.1:
            return 1, s, jump_steps[:n_events], jump_chans[:n_events], coherent
        u = uniforms[s]
        if u < dp:
            if u < dp0:
                k = 0
            elif u < dp0 + dp1:
                k = 1
            elif u < dp0 + dp1 + dp2:
                k = 2
            else:
                k = 3
            for m in range(4):
                psi[m] = 0.0
            psi[to_idx[k]] = 1.0
            if n_events == cap:
                cap *= 2
                new_steps = np.empty(cap, dtype=np.int64)
                new_chans = np.empty(cap, dtype=np.int64)
                new_steps[:n_events] = jump_steps
                new_chans[:n_events] = jump_chans
                jump_steps = new_steps
                jump_chans = new_chans
            jump_steps[n_events] = s
            jump_chans[n_events] = k
            n_events += 1
        else:
            a0 = prop[0, 0] * psi[0] + prop[0, 1] * psi[1] + prop[0, 2] * psi[2] + prop[0, 3] * psi[3]
            a1 = prop[1, 0] * psi[0] + prop[1, 1] * psi[1] + prop[1, 2] * psi[2] + prop[1, 3] * psi[3]
            a2 = prop[2, 0] * psi[0] + prop[2, 1] * psi[1] + prop[2, 2] * psi[2] + prop[2, 3] * psi[3]
            a3 = prop[3, 0] * psi[0] + prop[3, 1] * psi[1] + prop[3, 2] * psi[2] + prop[3, 3] * psi[3]
            nrm = np.sqrt(a0.real ** 2 + a0.imag ** 2 + a1.real ** 2 + a1.imag ** 2
                          + a2.real ** 2 + a2.imag ** 2 + a3.real ** 2 + a3.imag ** 2)
            psi[0] = a0 / nrm
            psi[1] = a1 / nrm
            psi[2] = a2 / nrm
            psi[3] = a3 / nrm
            coherent += 1
    return 0, n_events, jump_steps[:n_events], jump_chans[:n_events], coherent


def _validate_dt(p: SchemeParams, dt: float) -> None:
    g = departure_rates(p).as_tuple()
    gmax = max(g)
    if gmax > 0.0 and dt > DT_RATE_MARGIN / gmax:
        raise ValueError(
            f"dt={dt:g} too large: must be <= {DT_RATE_MARGIN / gmax:g} "
            f"(0.01 / fastest departure rate {gmax:g})")


def _run_kernel(p: SchemeParams, cfg: TrajectoryConfig, sample_every: int = 0):
    """Shared driver: returns (trajectory, sampled |c_i|^2 array or None)."""
    _validate_dt(p, cfg.dt)
    chans = jump_channels(p)
    prop = no_jump_propagator(p, cfg.dt)
    n_steps = int(round(cfg.t_max / cfg.dt))
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    uniforms = rng.random(n_steps)
    psi = basis_vector(cfg.initial_level)
    from_idx = np.array([ch.from_level - 1 for ch in chans], dtype=np.int64)
    to_idx = np.array([ch.to_level - 1 for ch in chans], dtype=np.int64)
    rates = np.array([ch.rate for ch in chans], dtype=np.float64)
    if sample_every > 0:
        n_rows = (n_steps + sample_every - 1) // sample_every
        pops = np.empty((n_rows, 4), dtype=np.float64)
    else:
        pops = np.empty((0, 4), dtype=np.float64)
    status, n_or_step, jump_steps, jump_chans, coherent = _trajectory_kernel(
        psi, prop, from_idx, to_idx, rates, cfg.dt, n_steps, uniforms,
        sample_every, pops)
    if status == 1:
        raise StepSizeTooLargeError(
            f"per-step jump probability exceeded {MAX_JUMP_PROBABILITY} "
            f"at t={(n_or_step + 1) * cfg.dt:g}; reduce dt")
    events = tuple(
        JumpEvent(time=float((s + 1) * cfg.dt),
                  channel=CHANNEL_LABELS[k],
                  post_level=chans[k].to_level)
        for s, k in zip(jump_steps, jump_chans)
    )
    traj = Trajectory(config=cfg, events=events, final_state=psi, coherent_steps=int(coherent))
    return traj, (pops if sample_every > 0 else None)


def run_trajectory(p: SchemeParams, cfg: TrajectoryConfig) -> Trajectory:
    """One stochastic trajectory; bit-reproducible for identical (p, cfg)."""
    traj, _ = _run_kernel(p, cfg)
    return traj


@dataclass(frozen=True)
class EnsemblePopulations:
    """Time series of ensemble-averaged level occupations with standard errors."""

    times: np.ndarray
    mean: np.ndarray    # shape (n_times, 4)
    stderr: np.ndarray  # shape (n_times, 4)
    n_trajectories: int


def ensemble_populations(p: SchemeParams, cfg: TrajectoryConfig, n_traj: int,
                         n_samples: int = 200) -> EnsemblePopulations:
    """Average |c_i(t)|^2 over n_traj independent trajectories.

    Trajectory k uses seed ``derive_seed(cfg.seed, k)``.  Populations are
    sampled on a uniform grid of ``n_samples`` times starting at t=0; the
    standard error is the across-trajectory spread / sqrt(n_traj).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    n_steps = int(round(cfg.t_max / cfg.dt))
    sample_every = max(1, n_steps // n_samples)
    acc = None
    acc2 = None
    for k in range(n_traj):
        cfg_k = replace(cfg, seed=derive_seed(cfg.seed, k))
        _, pops = _run_kernel(p, cfg_k, sample_every=sample_every)
        if acc is None:
            acc = np.zeros_like(pops)
            acc2 = np.zeros_like(pops)
        acc += pops
        acc2 += pops ** 2
    mean = acc / n_traj
    var = np.maximum(acc2 / n_traj - mean ** 2, 0.0)
    stderr = np.sqrt(var / max(n_traj, 1))
    times = np.arange(mean.shape[0]) * sample_every * cfg.dt
    return EnsemblePopulations(times=times, mean=mean, stderr=stderr, n_trajectories=n_traj)


def run_ensemble(p: SchemeParams, cfg: TrajectoryConfig, n_traj: int) -> list[Trajectory]:
    """n_traj independent trajectories with seeds split from cfg.seed."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    return [run_trajectory(p, replace(cfg, seed=derive_seed(cfg.seed, k)))
            for k in range(n_traj)]


@dataclass(frozen=True)
class EventLog:
    """Bare jump-event sequence of one trajectory (e.g. re-read from disk).

    Period extraction and statistics only need ``.events``, so an EventLog
    substitutes for a full Trajectory there.
    """

    events: tuple[JumpEvent, ...]


def write_events_csv(trajectories, path) -> None:
    """Dump jump events, one row per event: traj, time, channel, post_level."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj", "time", "channel", "post_level"])
        for k, traj in enumerate(trajectories):
            for ev in traj.events:
                writer.writerow([k, repr(ev.time), ev.channel, ev.post_level])


def read_events_csv(path) -> list[EventLog]:
    """Rebuild per-trajectory event sequences from :func:`write_events_csv` output."""
    import csv
    from collections import defaultdict

    by_traj: dict[int, list[JumpEvent]] = defaultdict(list)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"traj", "time", "channel", "post_level"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {sorted(required)}")
        for row in reader:
            by_traj[int(row["traj"])].append(JumpEvent(
                time=float(row["time"]), channel=row["channel"],
                post_level=int(row["post_level"])))
    return [EventLog(events=tuple(events)) for _, events in sorted(by_traj.items())]
