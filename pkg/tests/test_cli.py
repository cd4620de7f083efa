import json
import math
from pathlib import Path

import numpy as np
import pytest

from sgldiff.analysis import TheoremConstants
from sgldiff.cli import main
from sgldiff.csvio import read_table_csv, sha256_file


def _write(path: Path, text: str) -> str:
    path.write_text(text)
    return str(path)


def _dir_digests(out: Path) -> dict:
    return {
        p.name: sha256_file(p)
        for p in sorted(out.iterdir())
        if p.name != "run_manifest.json"
    }


@pytest.fixture
def small_fig1(tmp_path):
    return _write(tmp_path / "fig1.toml", "horizon = 20.0\nburn_in = 2.0\n")


class TestConfigHandling:
    def test_invalid_dt_rejected(self, tmp_path):
        cfg = _write(tmp_path / "bad.toml", "dt = -0.5\n")
        assert main(["figure1", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_burn_in_must_precede_horizon(self, tmp_path):
        cfg = _write(tmp_path / "bad.toml", "horizon = 5.0\nburn_in = 5.0\n")
        assert main(["figure1", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_unknown_option_rejected(self, tmp_path):
        cfg = _write(tmp_path / "bad.toml", "no_such_option = 1\n")
        assert main(["figure1", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["figure1", "--config", str(tmp_path / "nope.toml"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_bad_eta_flag(self, tmp_path):
        assert main(["figure2", "--eta", "1,zap", "--out", str(tmp_path / "o")]) == 2

    def test_threads_env_fallback(self, tmp_path, monkeypatch, small_fig1):
        monkeypatch.setenv("SGLDIFF_THREADS", "2")
        out = tmp_path / "env"
        assert main(["figure1", "--config", small_fig1, "--out", str(out),
                     "--seed", "3"]) == 0
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["config"]["threads"] == 2


class TestFigure1Command:
    def test_outputs_and_manifest(self, tmp_path, small_fig1):
        out = tmp_path / "f1"
        assert main(["figure1", "--config", small_fig1, "--out", str(out),
                     "--seed", "7"]) == 0
        for name in ("fig1_path.csv", "fig1_hist.csv", "fig1_density.csv",
                     "fig1_summary.json", "run_manifest.json"):
            assert (out / name).exists(), name
        manifest = json.loads((out / "run_manifest.json").read_text())
        for entry in manifest["files"]:
            assert sha256_file(out / entry["name"]) == entry["sha256"]
        summary = json.loads((out / "fig1_summary.json").read_text())
        assert 0.05 <= summary["variance"] <= 0.2
        assert summary["mixed"] is True

    def test_short_run_not_mixed(self, tmp_path):
        cfg = _write(tmp_path / "short.toml", "horizon = 0.01\nburn_in = 0.0\n")
        out = tmp_path / "short"
        assert main(["figure1", "--config", cfg, "--out", str(out)]) == 0
        summary = json.loads((out / "fig1_summary.json").read_text())
        assert summary["mixed"] is False
        assert summary["w1_to_target"] > 0.05

    def test_fixed_seed_byte_identical(self, tmp_path, small_fig1):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["figure1", "--config", small_fig1, "--out", str(out1),
                     "--seed", "11"]) == 0
        assert main(["figure1", "--config", small_fig1, "--out", str(out2),
                     "--seed", "11"]) == 0
        assert _dir_digests(out1) == _dir_digests(out2)

    def test_path_csv_schema(self, tmp_path, small_fig1):
        out = tmp_path / "schema"
        main(["figure1", "--config", small_fig1, "--out", str(out), "--seed", "1"])
        meta, header, cols = read_table_csv(out / "fig1_path.csv")
        assert header == ["t", "x_0", "index"]
        assert meta["kind"] == "trajectory"
        assert np.all(cols["index"] == -1)
        assert cols["t"][0] == 0.0


class TestFigure2Command:
    @pytest.fixture(scope="class")
    def fig2_out(self, tmp_path_factory):
        tmp = tmp_path_factory.mktemp("fig2")
        cfg = _write(tmp / "cfg.toml",
                     "horizon = 40.0\nburn_in = 4.0\nn_replicas = 2\n")
        out = tmp / "out"
        code = main(["figure2", "--config", str(cfg), "--out", str(out),
                     "--seed", "5", "--eta", "1.0,0.1,0.01"])
        assert code == 0
        return out

    def test_files_exist(self, fig2_out):
        for name in ("fig2_paths.csv", "fig2_hist.csv", "fig2_components.csv",
                     "fig2_density.csv", "fig2_sweep.csv", "fig2_summary.json"):
            assert (fig2_out / name).exists(), name

    def test_row_groups_per_eta(self, fig2_out):
        _, _, cols = read_table_csv(fig2_out / "fig2_paths.csv")
        assert set(np.unique(cols["eta"])) == {1.0, 0.1, 0.01}
        assert set(np.unique(cols["index"])) <= {0.0, 1.0}

    def test_component_variances(self, fig2_out):
        summary = json.loads((fig2_out / "fig2_summary.json").read_text())
        np.testing.assert_allclose(summary["component_variances"], [0.2, 1.0 / 15.0])

    def test_component_density_columns_are_gaussian(self, fig2_out):
        _, header, cols = read_table_csv(fig2_out / "fig2_components.csv")
        assert header == ["x", "component_0", "component_1"]
        x = cols["x"]
        want = np.exp(-((x - 5.0) ** 2) / (2 * 0.2)) / math.sqrt(2 * math.pi * 0.2)
        np.testing.assert_allclose(cols["component_0"], want, atol=1e-12)


class TestSweepEtaCommand:
    def test_sweep_table_only(self, tmp_path):
        cfg = _write(tmp_path / "cfg.toml",
                     "horizon = 30.0\nburn_in = 3.0\nn_replicas = 2\n")
        out = tmp_path / "sw"
        assert main(["sweep-eta", "--config", str(cfg), "--out", str(out),
                     "--seed", "6", "--eta", "1.0,0.01"]) == 0
        assert (out / "sweep.csv").exists()
        assert not (out / "fig2_paths.csv").exists()
        _, header, cols = read_table_csv(out / "sweep.csv")
        assert header == ["eta", "w1_mean", "w1_stderr", "var_mean",
                          "theorem3_bound"]
        assert len(cols["eta"]) == 2
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert summary["monotone"]["decreasing"] is True


class TestStrongErrorCommand:
    def test_single_component_zero_error(self, tmp_path):
        cfg = _write(
            tmp_path / "cfg.toml",
            "n_replicas = 20\n[family]\nname = 'quadratic'\na = [10.0]\nb = [0.0]\n",
        )
        out = tmp_path / "se"
        assert main(["strong-error", "--config", str(cfg), "--out", str(out),
                     "--eta", "0.1,0.01,0.001"]) == 0
        _, _, cols = read_table_csv(out / "strong_error.csv")
        np.testing.assert_array_equal(cols["estimate"], 0.0)

    def test_estimates_below_improved_bound(self, tmp_path):
        cfg = _write(tmp_path / "cfg.toml", "n_replicas = 60\n")
        out = tmp_path / "se2"
        assert main(["strong-error", "--config", str(cfg), "--out", str(out),
                     "--eta", "0.1,0.01,0.001", "--seed", "2"]) == 0
        summary = json.loads((out / "strong_error_summary.json").read_text())
        assert summary["all_within_improved"] is True
        assert "fitted_exponent" in summary


class TestErgodicityCommand:
    def test_initial_distance_matches_reference(self, tmp_path):
        cfg = _write(
            tmp_path / "cfg.toml",
            "n_replicas = 200\nref_horizon = 150.0\nn_boot = 40\n",
        )
        out = tmp_path / "er"
        assert main(["ergodicity", "--config", str(cfg), "--out", str(out),
                     "--seed", "3"]) == 0
        summary = json.loads((out / "ergodicity_summary.json").read_text())
        t0 = summary["rows"][0]
        assert t0["t"] == 0.0
        # at t = 0 the replica states are all x0, so the raw W1 equals the
        # mean absolute distance between x0 and the reference samples
        assert t0["w1_raw"] == pytest.approx(summary["w0"], rel=1e-9)
        assert summary["w0"] == pytest.approx(4.0, abs=0.2)


class TestCouplingCommand:
    def test_equal_starts_all_meet_at_zero(self, tmp_path):
        cfg = _write(
            tmp_path / "cfg.toml",
            "n_replicas = 10\nx0 = 1.0\ny0 = 1.0\nt_grid = [0.0, 0.5, 1.0]\n",
        )
        out = tmp_path / "cp"
        assert main(["coupling", "--config", str(cfg), "--out", str(out)]) == 0
        summary = json.loads((out / "coupling_summary.json").read_text())
        assert summary["coupled_fraction"] == 1.0
        assert summary["meeting_time_mean"] == 0.0
        assert summary["supermartingale"]["passed"] is True


class TestVerifyCommand:
    def test_small_battery_passes(self, tmp_path):
        cfg = _write(
            tmp_path / "cfg.toml",
            "verify_replicas = 40\nn_pairs = 500\nhorizon = 60.0\n",
        )
        out = tmp_path / "vf"
        assert main(["verify", "--config", str(cfg), "--out", str(out),
                     "--seed", "4"]) == 0
        report = json.loads((out / "verify.json").read_text())
        assert report["all_passed"] is True
        names = {e["check"] for e in report["checks"]}
        assert "plateau_not_convex_at_infinity" in names
        assert "lemma3_two_state" in names

    def test_misdeclared_lipschitz_fails(self, tmp_path):
        cfg = _write(
            tmp_path / "cfg.toml",
            "verify_replicas = 10\nn_pairs = 400\n"
            "checks = ['assumption1_family']\n"
            "[family]\ndeclared_L = 14.0\n",
        )
        out = tmp_path / "vf2"
        assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 1
        report = json.loads((out / "verify.json").read_text())
        assert report["all_passed"] is False

    def test_empty_battery(self, tmp_path):
        out = tmp_path / "vf3"
        assert main(["verify", "--checks", "", "--out", str(out)]) == 0
        report = json.loads((out / "verify.json").read_text())
        assert report["checks"] == []
        assert report["all_passed"] is True


class TestConstantsCommand:
    def test_round_trip_and_values(self, tmp_path):
        out = tmp_path / "const"
        assert main(["constants", "--out", str(out), "--seed", "9"]) == 0
        payload = json.loads((out / "constants.json").read_text())
        extra = payload.pop("C_phi_d")
        consts = TheoremConstants.from_dict(payload)
        assert consts.to_dict() == payload
        assert consts.c == pytest.approx(4.6387, rel=1e-4)
        assert extra == pytest.approx(474.66, rel=1e-4)
        _, header, cols = read_table_csv(out / "bounds.csv")
        assert "theorem1_improved" in header
        assert np.all(cols["theorem1_improved"] <= cols["theorem1_plain"] + 1e-12)


class TestThreadDeterminism:
    def test_thread_count_does_not_change_outputs(self, tmp_path):
        cfg = _write(tmp_path / "cfg.toml",
                     "horizon = 25.0\nburn_in = 2.0\nn_replicas = 3\n")
        outs = []
        for threads, name in ((1, "t1"), (3, "t3")):
            out = tmp_path / name
            assert main(["figure2", "--config", str(cfg), "--out", str(out),
                         "--seed", "8", "--eta", "0.5,0.05",
                         "--threads", str(threads)]) == 0
            outs.append(_dir_digests(out))
        assert outs[0] == outs[1]
