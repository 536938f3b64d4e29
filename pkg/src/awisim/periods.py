"""Segmentation of trajectories into coherent periods and their statistics.

A coherent period runs between two consecutive jumps: it starts in the level
the first jump landed on and ends in the level the next jump departed from.
Since no jump lands on level 3 and none departs from level 4, periods start
in {1, 2, 4} and end in {1, 2, 3} (nine possible types).

Photon bookkeeping: within one manifold of combined atom+field states, each
atomic level carries fixed photon-number offsets (weak, strong, probe);
traversing a period from level i to level j changes the field photon numbers
by the offset difference.  Only four period types change the probe photon
number: (2,1) and (4,1) add one probe photon (gain), (1,2) and (1,3) remove
one (loss).
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyStatisticsError
from .hamiltonian import CHANNEL_FROM_LEVEL

#: Photon-number offsets (weak, strong, probe) of each atomic level within a manifold.
MANIFOLD_OFFSETS = {
    1: (-1, +1, +1),
    2: (-1, +1, 0),
    3: (-1, 0, 0),
    4: (0, 0, 0),
}

#: All period types that can occur: start in {1, 2, 4}, end in {1, 2, 3}.
PERIOD_TYPES = tuple((i, j) for i in (1, 2, 4) for j in (1, 2, 3))


@dataclass(frozen=True)
class CoherentPeriod:
    """One coherent evolution segment between consecutive jumps."""

    start_level: int
    end_level: int
    duration: float

    def __post_init__(self):
        if self.start_level == 3:
            raise ValueError("no coherent period can start in level 3")
        if self.end_level == 4:
            raise ValueError("no coherent period can end in level 4")
        if self.start_level not in (1, 2, 4) or self.end_level not in (1, 2, 3):
            raise ValueError(f"invalid period ({self.start_level}, {self.end_level})")


def extract_periods(traj) -> list[CoherentPeriod]:
    """Complete periods of one trajectory, in time order.

    Period k spans from the post-jump level of event k to the origin level of
    event k+1.  The segments before the first jump and after the last jump
    are truncated and discarded.
    """
    events = traj.events
    out = []
    for a, b in zip(events, events[1:]):
        out.append(CoherentPeriod(
            start_level=a.post_level,
            end_level=CHANNEL_FROM_LEVEL[b.channel],
            duration=b.time - a.time,
        ))
    return out


def photon_deltas(period: CoherentPeriod) -> tuple[int, int, int]:
    """Photon-number changes (weak, strong, probe) accumulated over the period."""
    start = MANIFOLD_OFFSETS[period.start_level]
    end = MANIFOLD_OFFSETS[period.end_level]
    return tuple(e - s for e, s in zip(end, start))


def probe_delta(start_level: int, end_level: int) -> int:
    """Probe photon change of a period type, from the manifold offsets."""
    return MANIFOLD_OFFSETS[end_level][2] - MANIFOLD_OFFSETS[start_level][2]


@dataclass(frozen=True)
class PeriodStats:
    """Pooled period counts with fractions and binomial standard errors.

    ``p_start[i]`` is the fraction of periods starting in level i;
    ``p_period[(i, j)]`` the fraction of type (i, j); ``mean_delta_np`` the
    mean probe photon change per period with its multinomial standard error.
    """

    counts: dict[tuple[int, int], int]
    total: int
    p_start: dict[int, float]
    p_period: dict[tuple[int, int], float]
    stderr: dict[tuple[int, int], float]
    mean_delta_np: float
    mean_delta_np_err: float

    def count(self, i: int, j: int) -> int:
        return self.counts.get((i, j), 0)


def empirical_stats(trajectories, burn_in: float = 0.0) -> PeriodStats:
    """Pool complete periods across trajectories and tabulate the statistics.

    Accepts any sequence of objects with an ``.events`` tuple (Trajectory or
    EventLog).  Periods starting before ``burn_in`` are discarded, so that
    statistics can be restricted to the stationary regime.
    """
    counter: Counter = Counter()
    for traj in trajectories:
        for event, period in zip(traj.events, extract_periods(traj)):
            if event.time < burn_in:
                continue
            counter[(period.start_level, period.end_level)] += 1
    total = sum(counter.values())
    if total == 0:
        raise EmptyStatisticsError("no complete coherent periods in the given trajectories")

    counts = {t: counter.get(t, 0) for t in PERIOD_TYPES}
    p_period = {t: c / total for t, c in counts.items()}
    stderr = {t: math.sqrt(p * (1.0 - p) / total) for t, p in p_period.items()}
    p_start = {i: sum(p for (a, _), p in p_period.items() if a == i) for i in (1, 2, 3, 4)}

    mean = sum(probe_delta(i, j) * p for (i, j), p in p_period.items())
    second_moment = sum(probe_delta(i, j) ** 2 * p for (i, j), p in p_period.items())
    mean_err = math.sqrt(max(second_moment - mean ** 2, 0.0) / total)

    return PeriodStats(counts=counts, total=total, p_start=p_start, p_period=p_period,
                       stderr=stderr, mean_delta_np=mean, mean_delta_np_err=mean_err)


def mean_probe_change(stats: PeriodStats) -> float:
    """P(2,1) + P(4,1) - P(1,2) - P(1,3) from empirical fractions."""
    return (stats.p_period[(2, 1)] + stats.p_period[(4, 1)]
            - stats.p_period[(1, 2)] - stats.p_period[(1, 3)])


def write_stats_csv(stats: PeriodStats, path: str | Path) -> None:
    """CSV export: one row per period type plus a summary row.

    Columns are (i, j, count, p_ij, stderr); the final row carries
    ``mean_delta_np`` in the i column with its value and standard error.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "count", "p_ij", "stderr"])
        for (i, j) in PERIOD_TYPES:
            writer.writerow([i, j, stats.counts[(i, j)],
                             repr(stats.p_period[(i, j)]), repr(stats.stderr[(i, j)])])
        writer.writerow(["mean_delta_np", "", stats.total,
                         repr(stats.mean_delta_np), repr(stats.mean_delta_np_err)])
