"""SVG figures drawn from a result table alone.

Every function takes the result frame read back from CSV, so the figures can
be regenerated from the CSV without rerunning any engine.  Figures are built
on bare :class:`matplotlib.figure.Figure` objects, never through pyplot.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import os
import typing as t

import matplotlib as mpl
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from ..log import get_logger

# fixed salt and no date: identical data gives identical SVG bytes
_RC = {
    "svg.hashsalt": "uavrelay",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}
CONTOUR_LEVELS = (0.25, 0.5, 0.75)


def _values(frame: pd.DataFrame) -> pd.Series:
    """Analytic value where present, the Monte-Carlo estimate otherwise."""
    return frame["analytic"].where(frame["analytic"].notna(), frame["mc"])


def _ok(frame: pd.DataFrame, quantity: str) -> pd.DataFrame:
    rows = frame[(frame["quantity"] == quantity) & (frame["status"] == "ok")].copy()
    rows["value"] = _values(rows)
    return rows[rows["value"].notna()]


def _save(fig: Figure, path: str) -> str:
    with mpl.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _figure(ncols: int = 1) -> tuple[Figure, t.Any]:
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(4.2 * ncols, 3.4), layout="constrained")
        axes = fig.subplots(1, ncols, squeeze=False)[0]
    return fig, axes


def association_heatmap(frame: pd.DataFrame, path: str) -> str | None:
    """Relay association probability over (lambda_R, H_R), one panel per time."""
    rows = _ok(frame, "association")
    times = sorted(rows["t"].unique())
    grids = []
    for time in times:
        grid = rows[rows["t"] == time].pivot_table(
            index="H_R", columns="lambda_R", values="value", aggfunc="first"
        )
        if grid.shape[0] >= 2 and grid.shape[1] >= 2:
            grids.append((time, grid))
    if not grids:
        get_logger("plots").info("no (H_R, lambda_R) grid of association rows; heatmap skipped")
        return None

    fig, axes = _figure(len(grids))
    with mpl.rc_context(_RC):
        for ax, (time, grid) in zip(axes, grids):
            lam, height = np.meshgrid(grid.columns.to_numpy(float), grid.index.to_numpy(float))
            z = grid.to_numpy(float)
            mesh = ax.contourf(lam, height, z, levels=np.linspace(0, 1, 21), cmap="viridis")
            lines = ax.contour(lam, height, z, levels=CONTOUR_LEVELS, colors="white")
            ax.clabel(lines, fmt="%.2f", fontsize=7)
            ax.set_xscale("log")
            ax.set_xlabel(r"$\lambda_R$ [1/m$^2$]")
            ax.set_ylabel(r"$H_R$ [m]")
            ax.set_title(f"t = {time:g} s")
        fig.colorbar(mesh, ax=list(axes), label="relay association probability")
    return _save(fig, path)


def coverage_vs_beta(frame: pd.DataFrame, path: str) -> str | None:
    """Total coverage against the SINR threshold per altitude, one panel per time."""
    total = _ok(frame, "total")
    if total.empty or total["beta_dB"].nunique() < 2:
        get_logger("plots").info("no threshold sweep of total coverage; CP-vs-beta figure skipped")
        return None
    direct = _ok(frame, "direct_link")
    times = sorted(total["t"].unique())
    fig, axes = _figure(len(times))
    with mpl.rc_context(_RC):
        for ax, time in zip(axes, times):
            at_t = total[total["t"] == time]
            for i, (height, curve) in enumerate(at_t.groupby("H_R", sort=True)):
                curve = curve.sort_values("beta_dB")
                color = f"C{i}"
                ax.plot(curve["beta_dB"], curve["value"], color=color, label=f"H_R={height:g} m")
                mc = curve[curve["mc"].notna()]
                if not mc.empty:
                    ax.errorbar(
                        mc["beta_dB"],
                        mc["mc"],
                        yerr=mc["mc_halfwidth"],
                        fmt="o",
                        ms=3,
                        color=color,
                    )
            base = direct[direct["t"] == time].groupby("beta_dB", sort=True)["value"].first()
            if not base.empty:
                ax.plot(base.index, base.to_numpy(), "k--", label="direct link only")
            ax.set_ylim(0, 1)
            ax.set_xlabel(r"$\beta$ [dB]")
            ax.set_ylabel("coverage probability")
            label = at_t["t_over_T"].dropna()
            ax.set_title(f"t = {label.iloc[0]:g} T" if not label.empty else f"t = {time:g} s")
            ax.legend(fontsize=7)
    return _save(fig, path)


def coverage_vs_time(frame: pd.DataFrame, path: str) -> str | None:
    """Second-hop and two-hop coverage against normalised time per altitude."""
    parts = [q for q in ("second_hop", "relay_link") if not _ok(frame, q).empty]
    if not parts:
        return None
    rows = pd.concat([_ok(frame, q) for q in parts])
    rows = rows[rows["t_over_T"].notna()]
    if rows["t_over_T"].nunique() < 2:
        get_logger("plots").info("no time sweep; CP-vs-time figure skipped")
        return None
    fig, axes = _figure(1)
    ax = axes[0]
    styles = {"second_hop": "-", "relay_link": ":"}
    with mpl.rc_context(_RC):
        for i, (height, group) in enumerate(rows.groupby("H_R", sort=True)):
            for quantity, curve in group.groupby("quantity", sort=True):
                curve = curve.sort_values("t_over_T")
                ax.plot(
                    curve["t_over_T"],
                    curve["value"],
                    styles[quantity],
                    color=f"C{i}",
                    label=f"{quantity}, H_R={height:g} m",
                )
        ax.axvline(1.0, color="grey", lw=0.8)
        ax.set_xlabel("t / expected travel time")
        ax.set_ylabel("coverage probability")
        ax.legend(fontsize=7)
    return _save(fig, path)


VIEWS = {
    "association": association_heatmap,
    "coverage_vs_beta": coverage_vs_beta,
    "coverage_vs_time": coverage_vs_time,
}


def render_all(frame: pd.DataFrame, out_dir: str, stem: str) -> list[str]:
    """Draw every view the table has data for; returns the files written."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for view, draw in VIEWS.items():
        path = draw(frame, os.path.join(out_dir, f"{stem}_{view}.svg"))
        if path is not None:
            written.append(path)
    return written
