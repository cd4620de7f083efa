"""End-to-end check against real CSV outputs of the simulation CLI.

Skipped when the sgldiff package is not installed; the schemas themselves
are covered by the synthetic fixtures either way.
"""

import pytest

sgldiff_cli = pytest.importorskip("sgldiff.cli")

from sgldiff_plots import FigureSpec, render_figure1, render_figure2, save_figure


@pytest.fixture(scope="module")
def real_outputs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("real")
    cfg = tmp / "cfg.toml"
    cfg.write_text("horizon = 15.0\nburn_in = 2.0\nn_replicas = 2\n")
    out1 = tmp / "f1"
    out2 = tmp / "f2"
    assert sgldiff_cli.main(["figure1", "--config", str(cfg), "--out",
                             str(out1), "--seed", "42"]) == 0
    assert sgldiff_cli.main(["figure2", "--config", str(cfg), "--out",
                             str(out2), "--seed", "42",
                             "--eta", "1.0,0.1,0.01"]) == 0
    return out1, out2


def test_render_real_figure1(real_outputs, tmp_path):
    out1, _ = real_outputs
    spec = FigureSpec(out1, tmp_path / "fig1.png")
    fig = render_figure1(spec)
    assert len(fig.axes) == 2
    assert save_figure(fig, spec).stat().st_size > 0


def test_render_real_figure2(real_outputs, tmp_path):
    _, out2 = real_outputs
    spec = FigureSpec(out2, tmp_path / "fig2.svg", fmt="svg")
    fig = render_figure2(spec)
    assert len(fig.axes) == 6  # three rates, two panels each
    path = save_figure(fig, spec)
    assert path.read_text().count('id="axes_') == 6
