"""Command-line front end.

Subcommands::

    awisim preset <name> --out FILE [--units U]     emit a parameter file
    awisim dme-sweep --config F --sweep S --out O   steady-state probe response scan
    awisim semianalytic --config F --sweep S --out O  closed-form period statistics scan
    awisim mcwf-run --config F [--sweep S] ...      stochastic trajectories / sweep
    awisim periods --events E --out O               period statistics from an event dump
    awisim compare --config F --sweep S --out O     all methods + agreement report

``--sweep`` takes ``name:min:max:count`` (repeatable, at most twice) with the
range expressed in the configuration file's unit system (or ``--units``).
All computation happens in gamma_21 units; time flags (``--dt``, ``--tmax``,
``--burn-in``) are in units of 1/gamma_21.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .mcwf import (DEFAULT_BURN_IN, EventLog, TrajectoryConfig, read_events_csv,
                   run_ensemble, write_events_csv)
from .periods import empirical_stats, write_stats_csv
from .scheme import (PRESET_UNITS, PRESETS, SchemeParams, UNIT_SYSTEMS,
                     convert_params, load_params, save_params, to_gamma21_units)
from .sweep import SweepAxis, SweepSpec, compare_methods, run_sweep


def _parse_sweep_flag(raw: str) -> tuple[str, float, float, int]:
    parts = raw.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"--sweep expects name:min:max:count, got {raw!r}")
    name, lo, hi, count = parts
    try:
        return name, float(lo), float(hi), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --sweep value {raw!r}: {exc}") from exc


def _add_common(sub: argparse.ArgumentParser, sweep_required: bool) -> None:
    sub.add_argument("--config", required=True, help="parameter file")
    sub.add_argument("--sweep", action="append", type=_parse_sweep_flag,
                     required=sweep_required, metavar="NAME:MIN:MAX:COUNT",
                     help="swept parameter (repeatable, at most 2)")
    sub.add_argument("--out", required=True, help="output CSV path")
    sub.add_argument("--units", choices=UNIT_SYSTEMS, default=None,
                     help="unit system of --sweep ranges (default: config file units)")
    sub.add_argument("--workers", type=int, default=1, help="process-pool size")


def _add_mcwf_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--trajectories", type=int, default=200)
    sub.add_argument("--dt", type=float, default=5e-4, help="step, units 1/gamma_21")
    sub.add_argument("--tmax", type=float, default=200.0, help="horizon, units 1/gamma_21")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--initial-level", type=int, default=2, choices=(1, 2, 3, 4))
    sub.add_argument("--burn-in", type=float, default=DEFAULT_BURN_IN,
                     help="discard periods starting earlier, units 1/gamma_21")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awisim",
        description="Four-level amplification-without-inversion sweeps "
                    "(density matrix, quantum trajectories, period statistics)")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("preset", help="write a built-in parameter file")
    sp.add_argument("name", choices=sorted(PRESETS))
    sp.add_argument("--out", required=True)
    sp.add_argument("--units", choices=UNIT_SYSTEMS, default=None,
                    help="unit system to write (default: the preset's native one)")

    for cmd, help_text in (("dme-sweep", "steady-state probe response over a grid"),
                           ("semianalytic", "closed-form period statistics over a grid")):
        sub = subs.add_parser(cmd, help=help_text)
        _add_common(sub, sweep_required=True)

    sub = subs.add_parser("mcwf-run", help="stochastic trajectories (single point or sweep)")
    _add_common(sub, sweep_required=False)
    _add_mcwf_flags(sub)
    sub.add_argument("--events-out", default=None,
                     help="also dump jump events (traj,time,channel,post_level)")

    sub = subs.add_parser("periods", help="period statistics from an event dump")
    sub.add_argument("--events", required=True, help="event CSV from mcwf-run")
    sub.add_argument("--out", required=True)
    sub.add_argument("--burn-in", type=float, default=0.0)

    sub = subs.add_parser("compare", help="run all methods and report agreement")
    _add_common(sub, sweep_required=True)
    _add_mcwf_flags(sub)

    return parser


def _load_gamma21(args) -> tuple[SchemeParams, float]:
    """Load the config, convert to gamma_21 units; returns (params, sweep scale).

    The sweep scale converts CLI range values (in ``args.units`` or the config
    units) into gamma_21 units.
    """
    p, file_units = load_params(args.config)
    range_units = getattr(args, "units", None) or file_units
    p_us = convert_params(p, file_units, "us_inv") if file_units != "gamma21" else None
    if file_units == "gamma21":
        internal = p
        if range_units == "gamma21":
            scale = 1.0
        else:
            raise ValueError(
                "cannot convert sweep ranges from absolute units: the config is "
                "in gamma21 units with no absolute gamma_21 available")
    else:
        internal = to_gamma21_units(p_us)
        gamma21_us = p_us.gamma_21
        if range_units == "gamma21":
            scale = 1.0
        elif range_units == "us_inv":
            scale = 1.0 / gamma21_us
        else:  # two_pi_MHz
            from .scheme import TWO_PI
            scale = TWO_PI / gamma21_us
    return internal, scale


def _build_spec(args, method: str) -> SweepSpec:
    base, scale = _load_gamma21(args)
    axes = tuple(SweepAxis(name=n, lo=lo * scale, hi=hi * scale, count=c)
                 for n, lo, hi, c in (args.sweep or []))
    kwargs = dict(base=base, axes=axes, method=method, out_path=args.out,
                  workers=args.workers)
    if hasattr(args, "trajectories"):
        kwargs.update(n_trajectories=args.trajectories, dt=args.dt, t_max=args.tmax,
                      seed=args.seed, initial_level=args.initial_level,
                      burn_in=args.burn_in)
    return SweepSpec(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "preset":
        preset = PRESETS[args.name]()
        native = PRESET_UNITS[args.name]
        units = args.units or native
        if units != native:
            if native == "gamma21":
                raise SystemExit("this preset has no absolute rate scale; "
                                 "write it in gamma21 units")
            preset = convert_params(preset, native, units)
        save_params(preset, args.out, units=units)
        print(f"wrote {args.name} preset to {args.out} ({units})")
        return 0

    if args.command == "periods":
        logs = read_events_csv(args.events)
        stats = empirical_stats(logs, burn_in=args.burn_in)
        write_stats_csv(stats, args.out)
        print(f"{stats.total} complete periods -> {args.out} "
              f"(mean probe change {stats.mean_delta_np:+.3e} "
              f"+- {stats.mean_delta_np_err:.1e})")
        return 0

    if args.command in ("dme-sweep", "semianalytic"):
        method = "dme" if args.command == "dme-sweep" else "semianalytic"
        result = run_sweep(_build_spec(args, method))
        print(f"{len(result.rows)} grid points -> {args.out}")
        return 0

    if args.command == "mcwf-run":
        if args.sweep:
            spec = _build_spec(args, "mcwf")
            result = run_sweep(spec)
            print(f"{len(result.rows)} grid points -> {args.out}")
            return 0
        base, _ = _load_gamma21(args)
        cfg = TrajectoryConfig(dt=args.dt, t_max=args.tmax, seed=args.seed,
                               initial_level=args.initial_level)
        trajs = run_ensemble(base, cfg, args.trajectories)
        if args.events_out:
            write_events_csv(trajs, args.events_out)
        stats = empirical_stats(trajs, burn_in=args.burn_in)
        write_stats_csv(stats, args.out)
        print(f"{args.trajectories} trajectories, {stats.total} periods -> {args.out}")
        return 0

    if args.command == "compare":
        spec = _build_spec(args, "all")
        report = compare_methods(spec)
        print(f"{len(report.result.rows)} grid points -> {args.out}")
        print(report.summary())
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
