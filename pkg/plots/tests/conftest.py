"""Synthetic CSV fixtures in the frozen sgldiff output schemas.

Written by hand (no sgldiff import): the CSV format is the contract
between the simulation package and this plotting package.
"""

import math

import numpy as np
import pytest


def _write_csv(path, header, columns, meta=None):
    with open(path, "w") as fh:
        fh.write("# sgldiff-csv v1\n")
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _gaussian(x, mean, var):
    return np.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)


@pytest.fixture
def fig1_inputs(tmp_path):
    rng = np.random.default_rng(0)
    t = np.linspace(0.0, 10.0, 401)
    x = np.sin(t) * 0.3 + 0.05 * rng.standard_normal(len(t))
    _write_csv(tmp_path / "fig1_path.csv", ["t", "x_0", "index"],
               [t, x, np.full(len(t), -1, dtype=int)],
               {"kind": "trajectory", "seed": 1})
    edges = np.linspace(-1.0, 1.0, 41)
    centers = (edges[:-1] + edges[1:]) / 2
    dens = _gaussian(centers, 0.0, 0.1)
    _write_csv(tmp_path / "fig1_hist.csv", ["bin_center", "bin_width", "density"],
               [centers, np.diff(edges), dens], {"kind": "histogram"})
    grid = np.linspace(-1.2, 1.2, 201)
    _write_csv(tmp_path / "fig1_density.csv", ["x", "density"],
               [grid, _gaussian(grid, 0.0, 0.1)], {"kind": "density"})
    return tmp_path


def make_fig2_inputs(tmp_path, etas):
    rng = np.random.default_rng(1)
    t = np.linspace(0.0, 10.0, 301)
    path_cols = {k: [] for k in ("eta", "t", "x_0", "index")}
    hist_cols = {k: [] for k in ("eta", "bin_center", "bin_width", "density")}
    for eta in etas:
        x = np.cos(t / (0.2 + eta)) + 0.1 * rng.standard_normal(len(t))
        idx = (np.sin(t / (0.1 + eta)) > 0).astype(int)
        path_cols["eta"].append(np.full(len(t), eta))
        path_cols["t"].append(t)
        path_cols["x_0"].append(x)
        path_cols["index"].append(idx)
        edges = np.linspace(-3.0, 6.0, 31)
        centers = (edges[:-1] + edges[1:]) / 2
        hist_cols["eta"].append(np.full(len(centers), eta))
        hist_cols["bin_center"].append(centers)
        hist_cols["bin_width"].append(np.diff(edges))
        hist_cols["density"].append(_gaussian(centers, 0.0, 1.0))
    _write_csv(tmp_path / "fig2_paths.csv", ["eta", "t", "x_0", "index"],
               [np.concatenate(path_cols[k]) for k in ("eta", "t", "x_0", "index")],
               {"kind": "trajectory"})
    _write_csv(tmp_path / "fig2_hist.csv",
               ["eta", "bin_center", "bin_width", "density"],
               [np.concatenate(hist_cols[k])
                for k in ("eta", "bin_center", "bin_width", "density")],
               {"kind": "histogram"})
    grid = np.linspace(-3.0, 6.0, 101)
    _write_csv(tmp_path / "fig2_components.csv",
               ["x", "component_0", "component_1"],
               [grid, _gaussian(grid, 5.0, 0.2), _gaussian(grid, -5.0 / 3.0, 1 / 15)],
               {"kind": "density"})
    _write_csv(tmp_path / "fig2_density.csv", ["x", "density"],
               [grid, _gaussian(grid, 0.0, 0.1)], {"kind": "density"})
    return tmp_path


@pytest.fixture
def fig2_inputs(tmp_path):
    return make_fig2_inputs(tmp_path, [10.0, 1.0, 0.1, 0.01, 0.001])
