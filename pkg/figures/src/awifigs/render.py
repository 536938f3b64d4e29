"""Fixed-layout renderers, one per figure id.

All layouts are pure functions of the input CSV: fixed style, fixed dpi,
pinned PNG metadata, no timestamps, so re-rendering identical input yields
identical bytes.

Layouts
-------
fig2   two stacked panels of probe response vs probe detuning, one per pump
       value (from a two-axis pump x detuning sweep, or two single-axis CSVs)
fig4b  heat map of probe response over a two-axis sweep
fig5   probe response vs detuning with the period-statistics overlay, plus
       gain- and loss-channel probability panels
fig6   period probabilities and mean probe change vs pump rate (five panels)
fig7   steady-state populations vs weak-field strength
fig8   period probabilities and mean probe change vs weak/strong ratio
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, SweepTable, load_table
from .recipes import FigureRecipe

_STYLE = {
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}

_RESPONSE_LABEL = "Im[rho12] / Omega_p"
_GAIN_PAIRS = (("sa_p21", "P(2,1)"), ("sa_p41", "P(4,1)"))
_LOSS_PAIRS = (("sa_p12", "P(1,2)"), ("sa_p13", "P(1,3)"))
_ALL_PAIRS = _GAIN_PAIRS + _LOSS_PAIRS


def _axis_column(table: SweepTable, index: int) -> tuple[str, np.ndarray]:
    axes = table.axis_names
    if len(axes) <= index:
        raise SchemaError(f"need a sweep axis #{index + 1}; CSV has {axes}")
    (col,) = table.require(axes[index])
    return axes[index], col


def _render_fig2(table: SweepTable, table_b: SweepTable | None, fig):
    axes = fig.subplots(2, 1, sharex=True)
    if table_b is not None:
        panels = [(table, "pump off"), (table_b, "pump on")]
        for ax, (tab, label) in zip(axes, panels):
            name, x = _axis_column(tab, 0)
            (y,) = tab.require("im_rho12_over_omega_p")
            ax.plot(x, y, color="tab:blue")
            ax.axhline(0.0, color="k", lw=0.8)
            ax.set_ylabel(_RESPONSE_LABEL)
            ax.set_title(label)
        axes[1].set_xlabel(name)
        return
    pump_name, pump = _axis_column(table, 0)
    det_name, det = _axis_column(table, 1)
    (y,) = table.require("im_rho12_over_omega_p")
    values = np.unique(pump)
    if len(values) != 2:
        raise SchemaError(f"fig2 expects exactly two {pump_name} values, got {len(values)}")
    for ax, value, label in zip(axes, values, ("pump off", "pump on")):
        mask = pump == value
        ax.plot(det[mask], y[mask], color="tab:blue")
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_ylabel(_RESPONSE_LABEL)
        ax.set_title(f"{label} ({pump_name} = {value:g})")
    axes[1].set_xlabel(det_name)


def _render_fig4b(table: SweepTable, _unused, fig):
    xname, xcol = _axis_column(table, 0)
    yname, ycol = _axis_column(table, 1)
    (z,) = table.require("im_rho12_over_omega_p")
    xv, yv = np.unique(xcol), np.unique(ycol)
    grid = np.full((len(xv), len(yv)), np.nan)
    xi = np.searchsorted(xv, xcol)
    yi = np.searchsorted(yv, ycol)
    grid[xi, yi] = z
    ax = fig.subplots()
    mesh = ax.pcolormesh(yv, xv, grid, shading="nearest", cmap="RdBu_r")
    ax.set_xlabel(yname)
    ax.set_ylabel(xname)
    lo, hi = np.nanmin(grid), np.nanmax(grid)
    ax.set_title(f"{_RESPONSE_LABEL} (range {lo:.3g} .. {hi:.3g})")
    fig.colorbar(mesh, ax=ax)


def _render_fig5(table: SweepTable, _unused, fig):
    name, x = _axis_column(table, 0)
    (dme,) = table.require("im_rho12_over_omega_p")
    (dnp,) = table.require("sa_mean_delta_np")
    axes = fig.subplots(3, 1, sharex=True)

    ax = axes[0]
    scale = np.nanmax(np.abs(dme)) / max(np.nanmax(np.abs(dnp)), 1e-300)
    ax.plot(x, dme, color="tab:blue", label="steady-state response")
    ax.plot(x, dnp * scale, "--", color="tab:orange",
            label="mean probe change per period (scaled)")
    ax.axhline(0.0, color="k", lw=0.8)
    peak = x[int(np.nanargmax(dme))]
    ax.annotate(f"gain peak at {peak:g}", xy=(peak, np.nanmax(dme)),
                xytext=(peak + 0.05 * (x[-1] - x[0]), 0.85 * np.nanmax(dme)),
                arrowprops={"arrowstyle": "->"})
    ax.set_ylabel(_RESPONSE_LABEL)
    ax.legend(loc="upper right")

    for ax, pairs, title in ((axes[1], _GAIN_PAIRS, "gain channels"),
                             (axes[2], _LOSS_PAIRS, "loss channels")):
        for col, label in pairs:
            (y,) = table.require(col)
            ax.plot(x, y, label=label)
        ax.set_ylabel("probability")
        ax.set_title(title)
        ax.legend(loc="upper right")
    axes[2].set_xlabel(name)


def _panels_vs_axis(table: SweepTable, fig, xlabel_override=None, x_transform=None):
    name, x = _axis_column(table, 0)
    if x_transform is not None:
        x = x_transform(x)
    axes = fig.subplots(5, 1, sharex=True)
    for ax, (col, label) in zip(axes[:4], _ALL_PAIRS):
        (y,) = table.require(col)
        ax.plot(x, y, color="tab:green")
        ax.set_ylabel(label)
    (dnp,) = table.require("sa_mean_delta_np")
    axes[4].plot(x, dnp, color="k")
    axes[4].axhline(0.0, color="k", lw=0.8)
    axes[4].set_ylabel("mean probe change")
    axes[4].set_xlabel(xlabel_override or name)


def _render_fig6(table: SweepTable, _unused, fig):
    _panels_vs_axis(table, fig)


def _render_fig7(table: SweepTable, _unused, fig):
    name, x = _axis_column(table, 0)
    ax = fig.subplots()
    for col, label in (("p1", "level 1"), ("p2", "level 2"),
                       ("p3", "level 3"), ("p4", "level 4")):
        (y,) = table.require(col)
        ax.plot(x, y, label=label)
    ax.set_xlabel(name)
    ax.set_ylabel("steady-state population")
    ax.set_ylim(-0.05, 1.05)
    ax.legend(loc="center right")


def _render_fig8(table: SweepTable, _unused, fig):
    omega_s = table.base_params.get("omega_s")
    if omega_s:
        _panels_vs_axis(table, fig, xlabel_override="omega_w / omega_s",
                        x_transform=lambda x: x / omega_s)
    else:
        _panels_vs_axis(table, fig)


_RENDERERS = {
    "fig2": (_render_fig2, (6.0, 6.0)),
    "fig4b": (_render_fig4b, (6.0, 4.5)),
    "fig5": (_render_fig5, (6.0, 8.0)),
    "fig6": (_render_fig6, (6.0, 9.0)),
    "fig7": (_render_fig7, (6.0, 4.5)),
    "fig8": (_render_fig8, (6.0, 9.0)),
}


def render(recipe: FigureRecipe) -> None:
    """Render one recipe to its output path (deterministic bytes)."""
    table = load_table(recipe.csv)
    table_b = load_table(recipe.csv_b) if recipe.csv_b is not None else None
    renderer, size = _RENDERERS[recipe.figure]
    with plt.rc_context(_STYLE):
        fig = plt.figure(figsize=size)
        try:
            renderer(table, table_b, fig)
            fig.tight_layout()
            fig.savefig(recipe.out, format=recipe.out.suffix.lstrip(".") or "png",
                        metadata={"Software": "awifigs"})
        finally:
            plt.close(fig)
