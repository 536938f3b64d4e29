"""Parameter-grid sweeps over the three solvers, CSV output and comparisons.

A sweep varies one or two SchemeParams fields on a uniform grid (row-major
in declared order) and evaluates, per grid point and per selected method:

* ``dme``: steady-state probe response Im(rho_12)/omega_p and populations;
* ``semianalytic``: closed-form period probabilities (sa_*), exact-chain
  period probabilities, mean period duration and the per-time probe response
  predicted from them (sax_*);
* ``mcwf``: empirical period probabilities with binomial standard errors.

Rows are written in deterministic grid order with repr() float formatting,
so identical specs (including seeds) produce byte-identical CSV files.
Solver errors are captured per row in an ``error`` column and the sweep
continues.
"""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .errors import RegimeWarning
from .lindblad import populations, probe_response, steady_state
from .mcwf import DEFAULT_BURN_IN, TrajectoryConfig, run_ensemble
from .periods import empirical_stats, mean_probe_change
from .scheme import PARAM_FIELDS, SchemeParams
from .semianalytic import (
    exact_mean_probe_change,
    exact_period_probability,
    mean_period_duration,
    mean_probe_change_semianalytic,
    period_probability,
    probe_response_from_periods,
)

CSV_SCHEMA_VERSION = "awisim-sweep-csv v1"

METHODS = ("dme", "mcwf", "semianalytic", "all")

_DME_COLUMNS = ("im_rho12_over_omega_p", "p1", "p2", "p3", "p4")
_SA_COLUMNS = ("sa_p21", "sa_p12", "sa_p41", "sa_p13", "sa_mean_delta_np",
               "sax_p21", "sax_p12", "sax_p41", "sax_p13", "sax_mean_delta_np",
               "sax_mean_period", "sax_probe_response")
_MC_COLUMNS = ("mc_p21", "mc_p21_err", "mc_p12", "mc_p12_err",
               "mc_p41", "mc_p41_err", "mc_p13", "mc_p13_err",
               "mc_mean_delta_np", "mc_mean_delta_np_err", "mc_periods")


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter: uniform grid of ``count`` points on [lo, hi]."""

    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.name not in PARAM_FIELDS:
            raise ValueError(f"unknown sweep parameter {self.name!r}")
        if self.count < 2:
            raise ValueError("sweep count must be >= 2")
        if not self.lo < self.hi:
            raise ValueError(f"sweep range must satisfy min < max, got [{self.lo}, {self.hi}]")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters, one or two sweep axes, method and MCWF settings."""

    base: SchemeParams
    axes: tuple[SweepAxis, ...]
    method: str = "dme"
    out_path: str | None = None
    n_trajectories: int = 200
    dt: float = 5e-4
    t_max: float = 200.0
    seed: int = 1
    initial_level: int = 2
    burn_in: float = DEFAULT_BURN_IN
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("exactly one or two sweep axes required")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axis {names}")

    def grid_points(self) -> list[tuple[float, ...]]:
        """Grid values, row-major in declared axis order."""
        grids = [ax.grid() for ax in self.axes]
        if len(grids) == 1:
            return [(float(v),) for v in grids[0]]
        return [(float(a), float(b)) for a in grids[0] for b in grids[1]]


def _evaluate_point(spec: SweepSpec, values: tuple[float, ...]) -> dict:
    """One grid point; returns a column->value dict (error captured, not raised)."""
    row: dict = {ax.name: v for ax, v in zip(spec.axes, values)}
    p = spec.base.replace(**{ax.name: v for ax, v in zip(spec.axes, values)})
    want_dme = spec.method in ("dme", "all")
    want_sa = spec.method in ("semianalytic", "all")
    want_mc = spec.method in ("mcwf", "all")
    errors = []

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if want_dme:
            try:
                rho = steady_state(p)
                row["im_rho12_over_omega_p"] = probe_response(rho, p)
                row.update(zip(("p1", "p2", "p3", "p4"), populations(rho)))
            except Exception as exc:  # noqa: BLE001 - per-row capture is the contract
                errors.append(f"dme: {exc}")
        if want_sa:
            try:
                row["sa_p21"] = period_probability(p, 2, 1)
                row["sa_p12"] = period_probability(p, 1, 2)
                row["sa_p41"] = period_probability(p, 4, 1)
                row["sa_p13"] = period_probability(p, 1, 3)
                row["sa_mean_delta_np"] = mean_probe_change_semianalytic(p)
                row["sax_p21"] = exact_period_probability(p, 2, 1)
                row["sax_p12"] = exact_period_probability(p, 1, 2)
                row["sax_p41"] = exact_period_probability(p, 4, 1)
                row["sax_p13"] = exact_period_probability(p, 1, 3)
                row["sax_mean_delta_np"] = exact_mean_probe_change(p)
                row["sax_mean_period"] = mean_period_duration(p)
                row["sax_probe_response"] = probe_response_from_periods(p)
            except Exception as exc:  # noqa: BLE001
                errors.append(f"semianalytic: {exc}")
        if want_mc:
            try:
                cfg = TrajectoryConfig(dt=spec.dt, t_max=spec.t_max, seed=spec.seed,
                                       initial_level=spec.initial_level)
                trajs = run_ensemble(p, cfg, spec.n_trajectories)
                stats = empirical_stats(trajs, burn_in=spec.burn_in)
                for (i, j), col in (((2, 1), "mc_p21"), ((1, 2), "mc_p12"),
                                    ((4, 1), "mc_p41"), ((1, 3), "mc_p13")):
                    row[col] = stats.p_period[(i, j)]
                    row[col + "_err"] = stats.stderr[(i, j)]
                row["mc_mean_delta_np"] = mean_probe_change(stats)
                row["mc_mean_delta_np_err"] = stats.mean_delta_np_err
                row["mc_periods"] = stats.total
            except Exception as exc:  # noqa: BLE001
                errors.append(f"mcwf: {exc}")

    row["error"] = "; ".join(errors)
    return row


def _columns(spec: SweepSpec) -> list[str]:
    cols = [ax.name for ax in spec.axes]
    if spec.method in ("dme", "all"):
        cols += _DME_COLUMNS
    if spec.method in ("semianalytic", "all"):
        cols += _SA_COLUMNS
    if spec.method in ("mcwf", "all"):
        cols += _MC_COLUMNS
    cols.append("error")
    return cols


def _spec_echo(spec: SweepSpec) -> list[str]:
    """Deterministic metadata lines embedded in the CSV header."""
    base = " ".join(f"{k}={getattr(spec.base, k)!r}" for k in PARAM_FIELDS)
    axes = "; ".join(f"{ax.name}:{ax.lo!r}:{ax.hi!r}:{ax.count}" for ax in spec.axes)
    lines = [
        f"# {CSV_SCHEMA_VERSION}",
        f"# tool: awisim {__version__}",
        f"# method: {spec.method}",
        f"# sweep: {axes}",
        f"# base: {base}",
    ]
    if spec.method in ("mcwf", "all"):
        lines.append(f"# mcwf: trajectories={spec.n_trajectories} dt={spec.dt!r} "
                     f"t_max={spec.t_max!r} seed={spec.seed} "
                     f"initial_level={spec.initial_level} burn_in={spec.burn_in!r}")
    return lines


def _format(value) -> str:
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr even for numpy scalars
    if value is None:
        return ""
    return str(value)


@dataclass
class SweepResult:
    """Rows (dicts) in grid order plus the rendered CSV text."""

    spec: SweepSpec
    columns: list[str]
    rows: list[dict]
    csv_text: str

    def column(self, name: str) -> np.ndarray:
        """Numeric column as an array (NaN where missing)."""
        if name not in self.columns:
            raise KeyError(f"no column {name!r}")
        return np.array([float(r[name]) if r.get(name, "") != "" and r.get(name) is not None
                         else np.nan for r in self.rows])


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every grid point, render CSV, optionally write it to disk.

    With ``workers > 1`` grid points are dispatched to a process pool;
    results are gathered in grid order regardless of completion order, so
    the output is identical to a serial run.
    """
    points = spec.grid_points()
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(partial(_evaluate_point, spec), points))
    else:
        rows = [_evaluate_point(spec, values) for values in points]
    cols = _columns(spec)

    buf = io.StringIO()
    for line in _spec_echo(spec):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_format(row.get(c)) for c in cols])
    text = buf.getvalue()

    if spec.out_path is not None:
        Path(spec.out_path).write_text(text, encoding="utf-8")
    return SweepResult(spec=spec, columns=cols, rows=rows, csv_text=text)


# ---------------------------------------------------------------------------
# Cross-method comparison
# ---------------------------------------------------------------------------

@dataclass
class ComparisonReport:
    """Per-point cross-method table plus summary agreement metrics.

    ``sign_agreement`` is the fraction of grid points where the DME response
    and the period-statistics response agree in sign, among points where both
    exceed the noise floor; ``extremum_offset`` is the distance (in grid
    steps) between the locations of their maxima and minima; ``correlation``
    is the Pearson coefficient between the two curves (affine-invariant).
    """

    result: SweepResult
    sign_agreement: float
    max_offset: int
    min_offset: int
    correlation: float
    n_compared: int

    def summary(self) -> str:
        return (f"sign agreement {self.sign_agreement:.3f} over {self.n_compared} points; "
                f"extremum offsets (max {self.max_offset}, min {self.min_offset}) grid steps; "
                f"correlation {self.correlation:.5f}")


def compare_methods(spec: SweepSpec, noise_floor: float = 0.0) -> ComparisonReport:
    """Run all methods on the grid and score DME vs period-statistics agreement."""
    if spec.method != "all":
        spec = replace(spec, method="all")
    result = run_sweep(spec)
    dme = result.column("im_rho12_over_omega_p")
    sax = result.column("sax_probe_response")
    ok = ~(np.isnan(dme) | np.isnan(sax))
    dme, sax = dme[ok], sax[ok]
    if len(dme) < 2:
        raise ValueError("fewer than two comparable grid points")

    floor = noise_floor if noise_floor > 0.0 else 1e-6 * float(np.max(np.abs(dme)))
    significant = (np.abs(dme) > floor) & (np.abs(sax) > floor)
    if np.any(significant):
        agree = float(np.mean(np.sign(dme[significant]) == np.sign(sax[significant])))
        n_cmp = int(np.sum(significant))
    else:
        agree, n_cmp = 1.0, 0
    corr = float(np.corrcoef(dme, sax)[0, 1])
    return ComparisonReport(
        result=result,
        sign_agreement=agree,
        max_offset=abs(int(np.argmax(dme)) - int(np.argmax(sax))),
        min_offset=abs(int(np.argmin(dme)) - int(np.argmin(sax))),
        correlation=corr,
        n_compared=n_cmp,
    )
