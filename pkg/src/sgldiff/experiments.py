"""Experiment implementations behind the CLI subcommands.

Each experiment takes an :class:`~sgldiff.config.ExperimentConfig`, writes
CSV/JSON outputs plus a run manifest into the configured directory, and
returns an :class:`ExperimentResult` with the summary payload and an exit
code (0 success, 1 check failure).  Replica-level parallelism goes through
:func:`map_replicas`; results are reduced in replica order, so outputs are
byte-identical for any thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    CheckReport,
    compute_constants,
    fit_power_law,
    lemma1_check,
    lemma2_check,
    lemma3_check,
    lemma4_check,
    supermartingale_from_values,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
    bootstrap_w1_stderr,
    build_target_density_1d,
    effective_sample_size,
    w1_noise_floor,
    wasserstein1_1d,
    wasserstein1_vs_gaussian,
)
from .config import ExperimentConfig, FamilySpec
from .csvio import (
    append_rows_csv,
    write_json,
    write_manifest,
    write_table_csv,
    write_trajectory_csv,
)
from .errors import DivergenceError, SgldiffError
from .potentials import (
    check_assumption1,
    check_assumption2,
    check_dissipativeness,
    make_appendix_c_derivative,
    make_trig_family,
    wrap_gradient_1d,
)
from .processes import (
    config_digest,
    simulate_langevin,
    simulate_reflection_coupling,
    simulate_sgldiff,
    simulate_synchronous_pair,
)
from .rng import derive_seed


@dataclass
class ExperimentResult:
    summary: dict
    files: list[Path] = field(default_factory=list)
    exit_code: int = 0


def map_replicas(fn, n: int, threads: int) -> list:
    """Apply ``fn`` to replica ids 0..n-1, in order, optionally threaded."""
    if threads <= 1:
        return [fn(r) for r in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _cfg_digest(cfg: ExperimentConfig, experiment: str) -> str:
    """Config digest over science-relevant fields only.

    Execution details (thread count, output path) must not change emitted
    bytes, so they are excluded.
    """
    payload = cfg.to_dict()
    payload.pop("threads", None)
    payload.pop("out_dir", None)
    return config_digest({"experiment": experiment, "config": payload})


def gaussian_target_params(spec: FamilySpec) -> tuple[float, float] | None:
    """(mean, variance) of the stationary mean-field law for linear drifts."""
    if spec.name != "quadratic":
        return None
    a_bar = math.fsum(spec.a) / len(spec.a)
    b_bar = math.fsum(ai * bi for ai, bi in zip(spec.a, spec.b)) / math.fsum(spec.a)
    return b_bar, 1.0 / a_bar


def _target_domain(spec: FamilySpec) -> tuple[float, float]:
    params = gaussian_target_params(spec)
    if params is not None:
        mean, var = params
        half = 10.0 * math.sqrt(var)
        return (mean - half, mean + half)
    center = math.fsum(spec.shifts) / len(spec.shifts)
    return (center - 14.0, center + 14.0)


def _histogram(samples: np.ndarray, bins: int):
    density, edges = np.histogram(samples, bins=bins, density=True)
    centers = (edges[:-1] + edges[1:]) / 2.0
    widths = np.diff(edges)
    return centers, widths, density


def _finish(cfg: ExperimentConfig, command: str, summary: dict, files: list[Path],
            t_start: float, exit_code: int = 0) -> ExperimentResult:
    manifest = write_manifest(
        Path(cfg.out_dir), command, cfg.to_dict(), files, time.time() - t_start,
        __version__,
    )
    return ExperimentResult(summary, files + [manifest], exit_code)


# ---------------------------------------------------------------------------
# figure 1: mean-field diffusion path, histogram, target density


def run_figure1(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    seed = derive_seed(cfg.seed, "figure1")
    traj = simulate_langevin(fam, np.zeros(fam.dim), cfg.horizon, cfg.dt, seed)
    samples = traj.samples_after(cfg.burn_in, dt=cfg.dt)[:, 0]
    mean = float(samples.mean())
    variance = float(samples.var())

    gauss = gaussian_target_params(cfg.family)
    target = build_target_density_1d(fam, _target_domain(cfg.family))
    if gauss is not None:
        w1 = wasserstein1_vs_gaussian(samples, gauss[0], gauss[1]).value
    else:
        w1 = target.w1_to_samples(samples)
    mixed = bool(w1 < 0.05)

    files = []
    files.append(write_trajectory_csv(
        out / "fig1_path.csv", traj, {"experiment": "figure1"}, t_max=cfg.path_window,
    ))
    centers, widths, density = _histogram(samples, cfg.hist_bins)
    files.append(write_table_csv(
        out / "fig1_hist.csv", ["bin_center", "bin_width", "density"],
        [centers, widths, density],
        {"kind": "histogram", "seed": seed, "config": traj.config_digest},
    ))
    thin = max(1, len(target.grid) // 1024)
    files.append(write_table_csv(
        out / "fig1_density.csv", ["x", "density"],
        [target.grid[::thin], target.density[::thin]],
        {"kind": "density", "seed": seed, "config": traj.config_digest},
    ))
    summary = {
        "mean": mean,
        "variance": variance,
        "w1_to_target": w1,
        "mixed": mixed,
        "mix_threshold": 0.05,
        "n_samples": int(len(samples)),
        "target_gaussian": None if gauss is None else {"mean": gauss[0], "variance": gauss[1]},
        "seed": cfg.seed,
    }
    files.append(write_json(out / "fig1_summary.json", summary))
    return _finish(cfg, "figure1", summary, files, t_start)


# ---------------------------------------------------------------------------
# figure 2 / eta sweep: switched runs across learning rates


def _sweep_eta_stats(cfg: ExperimentConfig, fam, gauss, target, keep_replica0: bool):
    """Per-eta W1-to-target statistics over replicas.

    Returns one record per eta plus, optionally, replica 0's trajectory for
    path/histogram outputs.
    """
    records = []
    for k, eta in enumerate(cfg.etas):
        def one(r, eta=eta, k=k):
            traj = simulate_sgldiff(
                fam, eta, np.zeros(fam.dim), cfg.horizon, cfg.dt,
                derive_seed(cfg.seed, "eta_sweep", k, r),
            )
            s = traj.samples_after(cfg.burn_in, dt=cfg.dt)[:, 0]
            if gauss is not None:
                w1 = wasserstein1_vs_gaussian(s, gauss[0], gauss[1]).value
            else:
                w1 = target.w1_to_samples(s)
            keep = traj if (keep_replica0 and r == 0) else None
            return w1, float(s.var()), keep

        results = map_replicas(one, cfg.n_replicas, cfg.threads)
        w1s = np.array([v for v, _, _ in results])
        variances = np.array([v for _, v, _ in results])
        stderr = float(w1s.std(ddof=1) / math.sqrt(len(w1s))) if len(w1s) > 1 else 0.0
        records.append({
            "eta": eta,
            "w1_mean": float(w1s.mean()),
            "w1_stderr": stderr,
            "w1_replicas": w1s.tolist(),
            "var_mean": float(variances.mean()),
            "replica0": results[0][2],
        })
    return records


def _monotone_summary(records):
    """Decrease flags for consecutive etas (given in decreasing order)."""
    steps = []
    for prev, cur in zip(records, records[1:]):
        gap = prev["w1_mean"] - cur["w1_mean"]
        combined = math.hypot(prev["w1_stderr"], cur["w1_stderr"])
        steps.append({
            "eta_from": prev["eta"],
            "eta_to": cur["eta"],
            "gap": gap,
            "combined_stderr": combined,
            "significant_decrease": bool(gap > 2.0 * combined),
        })
    return {
        "decreasing": bool(all(s["gap"] > 0 for s in steps)),
        "significant": bool(all(s["significant_decrease"] for s in steps)),
        "steps": steps,
    }


def run_figure2(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    gauss = gaussian_target_params(cfg.family)
    target = build_target_density_1d(fam, _target_domain(cfg.family))
    consts = compute_constants(fam)
    records = _sweep_eta_stats(cfg, fam, gauss, target, keep_replica0=True)

    files = []
    paths_csv = out / "fig2_paths.csv"
    hist_csv = out / "fig2_hist.csv"
    paths_csv.unlink(missing_ok=True)
    hist_csv.unlink(missing_ok=True)
    digest = _cfg_digest(cfg, "figure2")
    for rec in records:
        traj = rec.pop("replica0")
        keep = traj.times <= cfg.path_window
        index = traj.index_annotation[keep]
        rows = zip(
            np.full(int(keep.sum()), rec["eta"]),
            traj.times[keep], traj.points[keep, 0], (int(v) for v in index),
        )
        append_rows_csv(
            paths_csv, ["eta", "t", "x_0", "index"], rows,
            {"kind": "trajectory", "seed": cfg.seed, "config": digest},
        )
        s = traj.samples_after(cfg.burn_in, dt=cfg.dt)[:, 0]
        centers, widths, density = _histogram(s, cfg.hist_bins)
        append_rows_csv(
            hist_csv, ["eta", "bin_center", "bin_width", "density"],
            zip(np.full(len(centers), rec["eta"]), centers, widths, density),
            {"kind": "histogram", "seed": cfg.seed, "config": digest},
        )
    files += [paths_csv, hist_csv]

    thin = max(1, len(target.grid) // 1024)
    grid = target.grid[::thin]
    files.append(write_table_csv(
        out / "fig2_density.csv", ["x", "density"],
        [grid, target.density[::thin]],
        {"kind": "density", "seed": cfg.seed, "config": digest},
    ))
    comp_columns = [grid]
    comp_header = ["x"]
    component_variances = []
    if cfg.family.name == "quadratic":
        for i, (ai, bi) in enumerate(zip(cfg.family.a, cfg.family.b)):
            var_i = 1.0 / ai
            component_variances.append(var_i)
            comp_header.append(f"component_{i}")
            comp_columns.append(
                np.exp(-((grid - bi) ** 2) / (2.0 * var_i)) / math.sqrt(2.0 * math.pi * var_i)
            )
    files.append(write_table_csv(
        out / "fig2_components.csv", comp_header, comp_columns,
        {"kind": "density", "seed": cfg.seed, "config": digest},
    ))

    rows = []
    for rec in records:
        bound3 = theorem3_bound(consts, rec["eta"])
        rec["theorem3_bound"] = bound3
        rec["within_theorem3"] = bool(rec["w1_mean"] <= bound3)
        rows.append({k: rec[k] for k in
                     ("eta", "w1_mean", "w1_stderr", "var_mean",
                      "theorem3_bound", "within_theorem3")})
    monotone = _monotone_summary(records)
    summary = {
        "rows": rows,
        "w1_replicas": {str(r["eta"]): r["w1_replicas"] for r in records},
        "monotone": monotone,
        "component_variances": component_variances,
        "target_gaussian": None if gauss is None else {"mean": gauss[0], "variance": gauss[1]},
        "within_theorem3_all": bool(all(r["within_theorem3"] for r in rows)),
        "seed": cfg.seed,
    }
    files.append(write_table_csv(
        out / "fig2_sweep.csv",
        ["eta", "w1_mean", "w1_stderr", "var_mean", "theorem3_bound"],
        [np.array([r[k] for r in rows]) for k in
         ("eta", "w1_mean", "w1_stderr", "var_mean", "theorem3_bound")],
        {"kind": "sweep", "seed": cfg.seed, "config": digest},
    ))
    files.append(write_json(out / "fig2_summary.json", summary))
    return _finish(cfg, "figure2", summary, files, t_start)


def run_sweep_eta(cfg: ExperimentConfig) -> ExperimentResult:
    """W1-to-target sweep over learning rates without figure payloads."""
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    gauss = gaussian_target_params(cfg.family)
    target = build_target_density_1d(fam, _target_domain(cfg.family))
    consts = compute_constants(fam)
    records = _sweep_eta_stats(cfg, fam, gauss, target, keep_replica0=False)
    for rec in records:
        rec.pop("replica0")
        rec["theorem3_bound"] = theorem3_bound(consts, rec["eta"])
    digest = _cfg_digest(cfg, "sweep_eta")
    files = [write_table_csv(
        out / "sweep.csv",
        ["eta", "w1_mean", "w1_stderr", "var_mean", "theorem3_bound"],
        [np.array([r[k] for r in records]) for k in
         ("eta", "w1_mean", "w1_stderr", "var_mean", "theorem3_bound")],
        {"kind": "sweep", "seed": cfg.seed, "config": digest},
    )]
    summary = {
        "rows": [{k: r[k] for k in ("eta", "w1_mean", "w1_stderr", "var_mean", "theorem3_bound")}
                 for r in records],
        "monotone": _monotone_summary(records),
        "seed": cfg.seed,
    }
    files.append(write_json(out / "sweep_summary.json", summary))
    return _finish(cfg, "sweep_eta", summary, files, t_start)


# ---------------------------------------------------------------------------
# strong error: synchronous pairs across learning rates


def run_strong_error(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    x0 = np.full(fam.dim, cfg.x0)
    consts = compute_constants(fam, theta0=x0)
    rows = []
    for k, eta in enumerate(cfg.etas):
        def one(r, eta=eta, k=k):
            try:
                pair = simulate_synchronous_pair(
                    fam, eta, x0, cfg.t_obs, cfg.dt,
                    derive_seed(cfg.seed, "strong_error", k, r),
                )
            except DivergenceError:
                return math.nan
            return float(pair.r[-1])

        vals = np.array(map_replicas(one, cfg.n_replicas, cfg.threads))
        ok = vals[np.isfinite(vals)]
        n_div = int(len(vals) - len(ok))
        if n_div > 0.01 * len(vals):
            raise SgldiffError(
                f"{n_div}/{len(vals)} replicas diverged at eta={eta:g}; "
                "reduce dt or the observation time"
            )
        bound = theorem1_bound(consts, eta, cfg.t_obs)
        rows.append({
            "eta": eta,
            "estimate": float(ok.mean()),
            "stderr": float(ok.std(ddof=1) / math.sqrt(len(ok))),
            "plain_bound": bound.plain,
            "improved_bound": bound.improved,
            "n_ok": int(len(ok)),
            "n_diverged": n_div,
        })
    fit = None
    if len(rows) >= 3 and all(r["estimate"] > 0 for r in rows):
        fit = fit_power_law([r["eta"] for r in rows], [r["estimate"] for r in rows])
    digest = _cfg_digest(cfg, "strong_error")
    files = [write_table_csv(
        out / "strong_error.csv",
        ["eta", "estimate", "stderr", "plain_bound", "improved_bound", "n_ok", "n_diverged"],
        [np.array([r[k] for r in rows]) for k in
         ("eta", "estimate", "stderr", "plain_bound", "improved_bound", "n_ok", "n_diverged")],
        {"kind": "strong_error", "seed": cfg.seed, "config": digest},
    )]
    summary = {
        "rows": rows,
        "fitted_exponent": None if fit is None else fit.exponent,
        "fitted_prefactor": None if fit is None else fit.prefactor,
        "r_squared": None if fit is None else fit.r_squared,
        "t_obs": cfg.t_obs,
        "all_within_improved": bool(all(r["estimate"] <= r["improved_bound"] for r in rows)),
        "seed": cfg.seed,
    }
    files.append(write_json(out / "strong_error_summary.json", summary))
    return _finish(cfg, "strong_error", summary, files, t_start)


# ---------------------------------------------------------------------------
# ergodicity: W1 decay toward the stationary switched law


def run_ergodicity(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    consts = compute_constants(fam)
    eta = cfg.eta
    t_grid = tuple(sorted(cfg.t_grid))
    horizon = max(t_grid)

    ref_traj = simulate_sgldiff(
        fam, eta, np.zeros(fam.dim), cfg.ref_horizon, cfg.dt,
        derive_seed(cfg.seed, "ergodicity_ref"),
    )
    ref = ref_traj.samples_after(cfg.burn_in, dt=cfg.dt)[:, 0]
    stride = max(1, int(math.ceil(len(ref) / cfg.ref_max_points)))
    ref = ref[::stride]
    ess_ref = effective_sample_size(ref)
    spacing = (cfg.ref_horizon - cfg.burn_in) / len(ref)
    ref_block = max(1, int(round(0.5 / spacing)))

    x0 = np.full(fam.dim, cfg.x0)
    w0 = wasserstein1_1d([cfg.x0], ref).value

    def one(r):
        traj = simulate_sgldiff(
            fam, eta, x0, horizon, cfg.dt,
            derive_seed(cfg.seed, "ergodicity", r),
            extra_times=t_grid,
        )
        pos = np.searchsorted(traj.times, t_grid)
        return traj.points[pos, 0]

    states = np.array(map_replicas(one, cfg.n_replicas, cfg.threads))
    floor_const = w1_noise_floor(ref, cfg.n_replicas, ess_ref)

    rows = []
    for j, t in enumerate(t_grid):
        col = states[:, j]
        raw = wasserstein1_1d(col, ref).value
        stderr = bootstrap_w1_stderr(
            col, ref, n_boot=cfg.n_boot, seed=derive_seed(cfg.seed, "ergodicity_boot", j),
            ref_block=ref_block, n_boot_ref=max(20, cfg.n_boot // 4),
        )
        debiased = raw - floor_const
        bound = theorem2_bound(consts, t, w0)
        rows.append({
            "t": t,
            "w1_raw": raw,
            "noise_floor": floor_const,
            "w1_debiased": debiased,
            "stderr": stderr,
            "bound": bound,
            "within_bound": bool(debiased <= bound + 2.0 * stderr),
        })

    # Fit the decay rate on grid times where the signal clears the floor.
    fit_ts = [r["t"] for r in rows if r["w1_raw"] > 3.0 * r["noise_floor"]]
    fit_ws = [r["w1_raw"] for r in rows if r["w1_raw"] > 3.0 * r["noise_floor"]]
    rate = None
    if len(fit_ts) >= 2:
        slope = np.polyfit(fit_ts, np.log(fit_ws), 1)[0]
        rate = float(-slope)

    digest = _cfg_digest(cfg, "ergodicity")
    files = [write_table_csv(
        out / "ergodicity.csv",
        ["t", "w1_raw", "noise_floor", "w1_debiased", "stderr", "bound"],
        [np.array([r[k] for r in rows]) for k in
         ("t", "w1_raw", "noise_floor", "w1_debiased", "stderr", "bound")],
        {"kind": "ergodicity", "seed": cfg.seed, "config": digest},
    )]
    summary = {
        "eta": eta,
        "w0": w0,
        "rows": rows,
        "c": consts.c,
        "C": consts.C,
        "fitted_decay_rate": rate,
        "ess_reference": ess_ref,
        "n_reference": int(len(ref)),
        "within_bound_all": bool(all(r["within_bound"] for r in rows)),
        "seed": cfg.seed,
    }
    files.append(write_json(out / "ergodicity_summary.json", summary))
    return _finish(cfg, "ergodicity", summary, files, t_start)


# ---------------------------------------------------------------------------
# coupling: reflection couplings, meeting times, supermartingale property


def run_coupling(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    consts = compute_constants(fam)
    t_grid = np.asarray(sorted(cfg.t_grid), dtype=float)
    horizon = float(t_grid[-1])
    x0 = np.full(fam.dim, cfg.x0)
    y0 = np.full(fam.dim, cfg.y0)

    def one(r):
        run = simulate_reflection_coupling(
            fam, cfg.eta, x0, y0, horizon, cfg.dt, cfg.eps_meet,
            derive_seed(cfg.seed, "coupling", r),
            bridge_detection=cfg.bridge_detection, extra_times=t_grid,
        )
        pos = np.searchsorted(run.path_a.times, t_grid)
        meet = math.inf if run.meeting_time is None else run.meeting_time
        return run.f_of_r[pos], run.r[pos], meet

    results = map_replicas(one, cfg.n_replicas, cfg.threads)
    f_vals = np.stack([f for f, _, _ in results])
    r_vals = np.stack([rv for _, rv, _ in results])
    meets = np.array([m for _, _, m in results])

    report = supermartingale_from_values(
        f_vals, t_grid, consts,
        seed=cfg.seed,
        digest=_cfg_digest(cfg, "coupling"),
    )
    coupled_fraction = float(np.mean(np.isfinite(meets)))
    scale = np.exp(consts.c * t_grid)
    scaled = f_vals * scale
    n = len(results)

    files = [write_table_csv(
        out / "coupling.csv",
        ["t", "mean_r", "mean_scaled_f", "stderr_scaled_f", "coupled_fraction_by_t"],
        [t_grid, r_vals.mean(axis=0), scaled.mean(axis=0),
         scaled.std(axis=0, ddof=1) / math.sqrt(n),
         np.array([(meets <= t).mean() for t in t_grid])],
        {"kind": "coupling", "seed": cfg.seed, "config": report.config_digest},
    )]
    finite = meets[np.isfinite(meets)]
    if len(finite):
        centers, widths, density = _histogram(finite, min(cfg.hist_bins, max(4, len(finite) // 10)))
    else:
        centers = widths = density = np.array([])
    files.append(write_table_csv(
        out / "coupling_meetings.csv", ["bin_center", "bin_width", "density"],
        [centers, widths, density],
        {"kind": "histogram", "seed": cfg.seed, "config": report.config_digest},
    ))
    summary = {
        "eta": cfg.eta,
        "eps_meet": cfg.eps_meet,
        "bridge_detection": cfg.bridge_detection,
        "coupled_fraction": coupled_fraction,
        "meeting_time_mean": float(finite.mean()) if len(finite) else None,
        "supermartingale": {
            "passed": report.passed,
            "worst_increment_margin": report.estimate,
            "details": report.details,
        },
        "c": consts.c,
        "seed": cfg.seed,
    }
    files.append(write_json(out / "coupling_summary.json", summary))
    exit_code = 0 if report.passed else 1
    return _finish(cfg, "coupling", summary, files, t_start, exit_code)


# ---------------------------------------------------------------------------
# verify: the full checker battery


def _assumption_to_report(name: str, rep, bound: float, n: int, seed: int,
                          expect_failure: bool = False,
                          expect_worst: float | None = None) -> CheckReport:
    passed = rep.passed
    if expect_failure:
        passed = (not rep.passed) and (
            expect_worst is None or rep.worst_ratio == expect_worst
        )
    return CheckReport(
        check=name, passed=bool(passed), estimate=float(rep.worst_ratio),
        bound=float(bound), stderr=0.0, n=n, seed=seed,
        config_digest=config_digest({"check": name, "n": n, "seed": seed}),
        details={"assumption_id": rep.assumption_id,
                 "expected_failure": expect_failure},
    )


def verify_battery(cfg: ExperimentConfig) -> list[CheckReport]:
    """Assumption checkers, lemma verifiers, and the coupling supermartingale.

    The battery honours ``cfg.checks`` as a name filter (None = all).
    """
    fam = cfg.family.build()
    trig = make_trig_family((0.0, math.pi))
    ou = FamilySpec(name="quadratic", a=(10.0,), b=(0.0,), radius=0.1).build()
    seed = cfg.seed
    n_small = cfg.verify_replicas
    reports: list[CheckReport] = []

    def want(name: str) -> bool:
        return cfg.checks is None or name in cfg.checks

    box = max(5.0, 1.2 * fam.declared_R)
    if want("assumption1_family"):
        rep = check_assumption1(fam, cfg.n_pairs, box, derive_seed(seed, "a1f"))
        reports.append(_assumption_to_report(
            "assumption1_family", rep, fam.declared_L, cfg.n_pairs, seed))
    if want("assumption2_family"):
        rep = check_assumption2(fam, cfg.n_pairs, box, derive_seed(seed, "a2f"))
        reports.append(_assumption_to_report(
            "assumption2_family", rep, fam.declared_K, cfg.n_pairs, seed))
    if want("assumption1_trig"):
        rep = check_assumption1(trig, cfg.n_pairs, 6.0, derive_seed(seed, "a1t"))
        reports.append(_assumption_to_report(
            "assumption1_trig", rep, trig.declared_L, cfg.n_pairs, seed))
    if want("assumption2_trig"):
        rep = check_assumption2(trig, cfg.n_pairs, 6.0, derive_seed(seed, "a2t"))
        reports.append(_assumption_to_report(
            "assumption2_trig", rep, trig.declared_K, cfg.n_pairs, seed))

    if want("dissipativeness_piecewise"):
        phi_prime = make_appendix_c_derivative()
        grid = np.linspace(-(2.0**10), 2.0**10, 4096)
        rep = check_dissipativeness(phi_prime, 0.5, 0.0, grid)
        reports.append(_assumption_to_report(
            "dissipativeness_piecewise", rep, 0.0, 4096, seed))
    if want("plateau_not_convex_at_infinity"):
        phi_prime = make_appendix_c_derivative()
        plateau_fam = wrap_gradient_1d(phi_prime, declared_L=2.0, declared_K=0.1,
                                       declared_R=1.0, name="piecewise-plateau")
        half = math.log(8.0) / 2.0
        rep = check_assumption2(
            plateau_fam, min(cfg.n_pairs, 2000), half, derive_seed(seed, "plateau"),
            center=[2.0**8 + half],
        )
        reports.append(_assumption_to_report(
            "plateau_not_convex_at_infinity", rep, 0.1, min(cfg.n_pairs, 2000), seed,
            expect_failure=True, expect_worst=0.0))

    lemma_families = [("family", fam), ("ou", ou), ("trig", trig)]
    for tag, f in lemma_families:
        if want(f"lemma1_{tag}"):
            reports.append(lemma1_check(f, t=1.0, dt=cfg.dt, n_replicas=n_small,
                                        seed=derive_seed(seed, f"l1_{tag}")))
            reports[-1].check = f"lemma1_{tag}"
        if want(f"lemma2_{tag}"):
            reports.append(lemma2_check(f, t=1.0, s=0.5, dt=cfg.dt, n_replicas=n_small,
                                        seed=derive_seed(seed, f"l2_{tag}")))
            reports[-1].check = f"lemma2_{tag}"

    if want("lemma3_two_state"):
        reports.append(lemma3_check(
            np.array([[1.0], [-1.0]]), eta=0.1, t=1.0,
            n_replicas=max(2000, n_small), seed=derive_seed(seed, "l3")))
        reports[-1].check = "lemma3_two_state"
    if want("lemma4_family"):
        reports.append(lemma4_check(
            fam, eta=cfg.eta, horizon=min(cfg.horizon, 500.0), dt=cfg.dt,
            burn_in=cfg.burn_in, seed=derive_seed(seed, "l4")))
        reports[-1].check = "lemma4_family"

    if want("supermartingale_trig"):
        consts = compute_constants(trig)
        grid = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
        n_c = max(200, n_small)
        def one(r):
            run = simulate_reflection_coupling(
                trig, 0.1, np.array([3.0]), np.array([-3.0]), 2.0, cfg.dt,
                cfg.eps_meet, derive_seed(seed, "sm", r), extra_times=grid)
            pos = np.searchsorted(run.path_a.times, grid)
            return run.f_of_r[pos]
        f_vals = np.stack(map_replicas(one, n_c, cfg.threads))
        reports.append(supermartingale_from_values(
            f_vals, grid, consts, seed=seed,
            digest=config_digest({"check": "supermartingale_trig", "seed": seed})))
        reports[-1].check = "supermartingale_trig"

    if want("constants_sanity"):
        consts = compute_constants(fam)
        ok = (consts.c <= consts.K) and (consts.C >= 2.0) and (0.0 < consts.c_phi < 0.25)
        reports.append(CheckReport(
            check="constants_sanity", passed=bool(ok), estimate=consts.c_phi,
            bound=0.25, stderr=0.0, n=1, seed=seed,
            config_digest=config_digest({"check": "constants_sanity"}),
            details={"c": consts.c, "C": consts.C},
        ))
    return reports


def run_verify(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    reports = verify_battery(cfg)
    entries = []
    for rep in reports:
        entry = {
            "check": rep.check, "passed": rep.passed, "estimate": rep.estimate,
            "bound": rep.bound, "stderr": rep.stderr, "n": rep.n,
            "seed": rep.seed, "config_digest": rep.config_digest,
        }
        entries.append(entry)
    all_passed = all(e["passed"] for e in entries)
    summary = {"checks": entries, "all_passed": bool(all_passed), "seed": cfg.seed}
    files = [write_json(out / "verify.json", summary)]
    return _finish(cfg, "verify", summary, files, t_start,
                   exit_code=0 if all_passed else 1)


# ---------------------------------------------------------------------------
# constants: tables of theorem constants and bounds


def run_constants(cfg: ExperimentConfig) -> ExperimentResult:
    t_start = time.time()
    out = Path(cfg.out_dir)
    fam = cfg.family.build()
    consts = compute_constants(fam)
    payload = consts.to_dict()
    payload["C_phi_d"] = consts.C_phi_d
    files = [write_json(out / "constants.json", payload)]

    etas, ts, th1p, th1i, th2f, th3, comb = [], [], [], [], [], [], []
    for eta in cfg.etas:
        for t in cfg.bound_ts:
            b1 = theorem1_bound(consts, eta, t)
            etas.append(eta)
            ts.append(t)
            th1p.append(b1.plain)
            th1i.append(b1.improved)
            th2f.append(theorem2_bound(consts, t, 1.0))
            th3.append(theorem3_bound(consts, eta))
            comb.append(theorem3_bound(consts, eta) + theorem2_bound(consts, t, 1.0))
    digest = _cfg_digest(cfg, "constants")
    files.append(write_table_csv(
        out / "bounds.csv",
        ["eta", "t", "theorem1_plain", "theorem1_improved",
         "theorem2_unit_decay", "theorem3", "combined_unit"],
        [np.array(v) for v in (etas, ts, th1p, th1i, th2f, th3, comb)],
        {"kind": "bounds", "seed": cfg.seed, "config": digest},
    ))
    summary = {"constants": payload, "n_bound_rows": len(etas), "seed": cfg.seed}
    return _finish(cfg, "constants", summary, files, t_start)


RUNNERS = {
    "figure1": run_figure1,
    "figure2": run_figure2,
    "sweep_eta": run_sweep_eta,
    "strong_error": run_strong_error,
    "ergodicity": run_ergodicity,
    "coupling": run_coupling,
    "verify": run_verify,
    "constants": run_constants,
}
