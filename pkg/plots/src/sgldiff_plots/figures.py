"""Figure rendering: sample paths with index colouring, histogram plus
density overlays.

``render_figure1`` draws one row (path, density); ``render_figure2`` one
row per learning rate from the row-grouped CSVs.  Both return the
matplotlib figure; ``save_figure`` writes PNG or SVG.  Rendering is a pure
function of the CSV inputs and the spec: no statistic is recomputed here.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figcsv import FigureSpec, SchemaError, read_csv_columns, split_by_eta

# Stable ids make SVG output reproducible.
matplotlib.rcParams["svg.hashsalt"] = "sgldiff-plots"


def _plot_indexed_path(ax, t, x, index, colors):
    """Path segments coloured by the active component (teal for 1, black
    otherwise).  Segment ends are extended by one sample so switches do
    not leave gaps."""
    if np.all(index < 0):
        ax.plot(t, x, color=colors["index0"], linewidth=0.6)
        return
    for value, key in ((0, "index0"), (1, "index1")):
        mask = index == value
        if not mask.any():
            continue
        y = np.where(mask, x, np.nan)
        # keep the sample right after a switch so segments touch
        ends = np.flatnonzero(mask[:-1] & ~mask[1:])
        y[ends + 1] = x[ends + 1]
        ax.plot(t, y, color=colors[key], linewidth=0.6)


def _plot_density_panel(ax, hist, densities, colors):
    ax.bar(
        hist["bin_center"], hist["density"], width=hist["bin_width"],
        color=colors["histogram"], alpha=0.6, linewidth=0,
    )
    for label, (x, y, color) in densities.items():
        ax.plot(x, y, color=color, linewidth=1.2, label=label)


def render_figure1(spec: FigureSpec):
    """Two panels: sample path, then histogram with the target density."""
    path = read_csv_columns(spec.input_dir / "fig1_path.csv", ["t", "x_0", "index"])
    hist = read_csv_columns(
        spec.input_dir / "fig1_hist.csv", ["bin_center", "bin_width", "density"]
    )
    dens = read_csv_columns(spec.input_dir / "fig1_density.csv", ["x", "density"])
    fig, (ax_path, ax_dens) = plt.subplots(
        1, 2, figsize=spec.row_size, constrained_layout=True
    )
    _plot_indexed_path(ax_path, path["t"], path["x_0"],
                       path["index"].astype(int), spec.colors)
    ax_path.set_xlabel("t")
    ax_path.set_ylabel("x")
    _plot_density_panel(
        ax_dens, hist,
        {"target": (dens["x"], dens["density"], spec.colors["target"])},
        spec.colors,
    )
    ax_dens.set_xlabel("x")
    ax_dens.set_ylabel("density")
    return fig


def render_figure2(spec: FigureSpec):
    """One row per learning rate: indexed path and density overlays.

    The y-scales are chosen per panel (the spread varies by orders of
    magnitude across rates).
    """
    paths = split_by_eta(read_csv_columns(
        spec.input_dir / "fig2_paths.csv", ["eta", "t", "x_0", "index"]
    ))
    hists = dict(split_by_eta(read_csv_columns(
        spec.input_dir / "fig2_hist.csv",
        ["eta", "bin_center", "bin_width", "density"],
    )))
    comps = read_csv_columns(spec.input_dir / "fig2_components.csv", ["x"])
    target = read_csv_columns(spec.input_dir / "fig2_density.csv", ["x", "density"])
    if not paths:
        raise SchemaError("fig2_paths.csv: no row groups")
    n_rows = len(paths)
    fig, axes = plt.subplots(
        n_rows, 2,
        figsize=(spec.row_size[0], spec.row_size[1] * n_rows),
        constrained_layout=True, squeeze=False,
    )
    comp_names = [c for c in comps if c.startswith("component_")]
    for row, (eta, group) in enumerate(paths):
        ax_path, ax_dens = axes[row]
        _plot_indexed_path(ax_path, group["t"], group["x_0"],
                           group["index"].astype(int), spec.colors)
        ax_path.set_ylabel(f"eta = {eta:g}")
        if eta not in hists:
            raise SchemaError(f"fig2_hist.csv: missing row group for eta={eta:g}")
        densities = {}
        for i, name in enumerate(sorted(comp_names)):
            color = spec.colors["index0"] if i == 0 else spec.colors["index1"]
            densities[name] = (comps["x"], comps[name], color)
        densities["target"] = (target["x"], target["density"], spec.colors["target"])
        _plot_density_panel(ax_dens, hists[eta], densities, spec.colors)
        if row == n_rows - 1:
            ax_path.set_xlabel("t")
            ax_dens.set_xlabel("x")
    return fig


def save_figure(fig, spec: FigureSpec) -> Path:
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path, format=spec.fmt, dpi=spec.dpi,
                metadata=None if spec.fmt == "png" else {"Date": None})
    plt.close(fig)
    return spec.out_path


def _parse_args(argv, default_out):
    parser = argparse.ArgumentParser()
    parser.add_argument("--input", required=True, help="directory with the CSV inputs")
    parser.add_argument("--out", default=default_out, help="output image path")
    parser.add_argument("--format", default="png", choices=("png", "svg"))
    parser.add_argument("--dpi", type=int, default=150)
    return parser.parse_args(argv)


def figure1_entry(argv=None) -> int:
    args = _parse_args(argv, "figure1.png")
    spec = FigureSpec(args.input, args.out, fmt=args.format, dpi=args.dpi)
    try:
        fig = render_figure1(spec)
    except SchemaError as exc:
        print(f"input error: {exc}")
        return 2
    out = save_figure(fig, spec)
    print(f"wrote {out}")
    return 0


def figure2_entry(argv=None) -> int:
    args = _parse_args(argv, "figure2.png")
    spec = FigureSpec(args.input, args.out, fmt=args.format, dpi=args.dpi)
    try:
        fig = render_figure2(spec)
    except SchemaError as exc:
        print(f"input error: {exc}")
        return 2
    out = save_figure(fig, spec)
    print(f"wrote {out}")
    return 0
