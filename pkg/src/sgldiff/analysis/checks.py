"""Monte Carlo verifiers for the moment, continuity, averaging, and
supermartingale properties behind the convergence bounds.

Each verifier simulates the relevant process with per-replica substreams,
compares an unbiased Monte Carlo estimate with the closed-form bound, and
reports a :class:`CheckReport`.  Pass/fail decisions use two standard
errors of the estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InvalidParameterError
from ..potentials import PotentialFamily
from ..processes import (
    CoupledTrajectory,
    config_digest,
    sample_index_path,
    simulate_langevin,
    simulate_sgldiff,
)
from ..rng import derive_seed, substream, INDEX
from .constants import TheoremConstants, compute_constants


@dataclass
class CheckReport:
    """Outcome of one verifier: estimate vs bound with Monte Carlo error."""

    check: str
    passed: bool
    estimate: float
    bound: float
    stderr: float
    n: int
    seed: int
    config_digest: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "check": self.check,
            "passed": bool(self.passed),
            "estimate": self.estimate,
            "bound": self.bound,
            "stderr": self.stderr,
            "n": self.n,
            "seed": self.seed,
            "config_digest": self.config_digest,
        }
        payload.update(self.details)
        return json.dumps(payload, sort_keys=True)


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    n = len(values)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def lemma1_check(
    family: PotentialFamily,
    t: float,
    dt: float,
    n_replicas: int,
    seed: int,
    x0=None,
) -> CheckReport:
    """Second moment of the mean-field diffusion at time t vs its bound."""
    if t < 0:
        raise InvalidParameterError("t must be nonnegative")
    x0 = np.zeros(family.dim) if x0 is None else np.atleast_1d(np.asarray(x0, float))
    consts = compute_constants(family, theta0=x0)
    vals = np.empty(n_replicas)
    for r in range(n_replicas):
        traj = simulate_langevin(
            family, x0, horizon=t, dt=dt, seed=derive_seed(seed, "lemma1", r)
        )
        vals[r] = float(np.linalg.norm(traj.points[-1]) ** 2)
    estimate, stderr = _mean_stderr(vals)
    bound = consts.tilde_c(t)
    digest = config_digest(
        {"check": "lemma1", "family": family.describe(), "t": t, "dt": dt,
         "n": n_replicas, "seed": seed, "x0": x0.tolist()}
    )
    return CheckReport(
        "second_moment_bound", estimate <= bound + 2.0 * stderr, estimate, bound,
        stderr, n_replicas, seed, digest,
    )


def lemma2_check(
    family: PotentialFamily,
    t: float,
    s: float,
    dt: float,
    n_replicas: int,
    seed: int,
    x0=None,
) -> CheckReport:
    """Mean-square time increment of the mean-field diffusion vs its bound."""
    if not 0 <= s <= t:
        raise InvalidParameterError("need 0 <= s <= t")
    x0 = np.zeros(family.dim) if x0 is None else np.atleast_1d(np.asarray(x0, float))
    consts = compute_constants(family, theta0=x0)
    vals = np.empty(n_replicas)
    for r in range(n_replicas):
        traj = simulate_langevin(
            family, x0, horizon=t, dt=dt,
            seed=derive_seed(seed, "lemma2", r), extra_times=[s],
        )
        ks = int(np.searchsorted(traj.times, s))
        vals[r] = float(np.linalg.norm(traj.points[-1] - traj.points[ks]) ** 2)
    estimate, stderr = _mean_stderr(vals)
    bound = consts.c_lemma2(t) * abs(t - s)
    digest = config_digest(
        {"check": "lemma2", "family": family.describe(), "t": t, "s": s, "dt": dt,
         "n": n_replicas, "seed": seed, "x0": x0.tolist()}
    )
    return CheckReport(
        "time_continuity_bound", estimate <= bound + 2.0 * stderr, estimate, bound,
        stderr, n_replicas, seed, digest,
    )


def lemma3_check(
    g: Sequence[np.ndarray] | np.ndarray,
    eta: float,
    t: float,
    n_replicas: int,
    seed: int,
) -> CheckReport:
    """Ergodic-averaging rate of the index process.

    For centred g (sum over components = 0), the squared integral of
    g over an index path of length t/eta is bounded by
    ``(2 max|g_i|^2 / N) (t / eta)``, uniformly over the initial state.
    The integral is accumulated exactly between jumps; the report carries
    the worst initial state's estimate.
    """
    g = np.atleast_2d(np.asarray(g, dtype=float))
    n_comp = g.shape[0]
    if n_comp < 1:
        raise InvalidParameterError("g must have at least one component")
    if float(np.abs(g.sum(axis=0)).max()) > 1e-12:
        raise InvalidParameterError("g must be centred: sum_i g_i = 0 within 1e-12")
    horizon = t / eta
    norms2 = np.einsum("ij,ij->i", g, g)
    bound = 2.0 * float(norms2.max()) / n_comp * horizon
    estimates = np.empty(n_comp)
    stderrs = np.empty(n_comp)
    for j in range(n_comp):
        vals = np.empty(n_replicas)
        for r in range(n_replicas):
            rng = substream(derive_seed(seed, "lemma3", j, r), INDEX)
            path = sample_index_path(n_comp, 1.0, horizon, initial_state=j, rng=rng)
            bounds_t = np.append(path.jump_times, horizon)
            lengths = np.diff(bounds_t)
            integral = lengths @ g[path.states]
            vals[r] = float(np.dot(integral, integral))
        estimates[j], stderrs[j] = _mean_stderr(vals)
    worst = int(np.argmax(estimates))
    estimate = float(estimates[worst])
    stderr = float(stderrs[worst])
    digest = config_digest(
        {"check": "lemma3", "g": g.tolist(), "eta": eta, "t": t,
         "n": n_replicas, "seed": seed}
    )
    return CheckReport(
        "index_averaging_bound", estimate <= bound + 2.0 * stderr, estimate, bound,
        stderr, n_replicas, seed, digest,
        details={"per_state_estimates": estimates.tolist(), "worst_state": worst},
    )


def lemma4_check(
    family: PotentialFamily,
    eta: float,
    horizon: float,
    dt: float,
    burn_in: float,
    seed: int,
) -> CheckReport:
    """First absolute moment of the stationary switched law vs its bound.

    Estimated from one long run after burn-in; the standard error uses the
    effective sample size of the norm series.
    """
    from .wasserstein import effective_sample_size

    consts = compute_constants(family)
    traj = simulate_sgldiff(family, eta, np.zeros(family.dim), horizon, dt, seed)
    samples = traj.samples_after(burn_in, dt=dt)
    norms = np.linalg.norm(samples, axis=1)
    ess = effective_sample_size(norms)
    estimate = float(norms.mean())
    stderr = float(norms.std(ddof=1) / math.sqrt(max(ess, 2.0)))
    bound = consts.C1_d
    digest = config_digest(
        {"check": "lemma4", "family": family.describe(), "eta": eta,
         "horizon": horizon, "dt": dt, "burn_in": burn_in, "seed": seed}
    )
    return CheckReport(
        "stationary_first_moment_bound", estimate <= bound + 2.0 * stderr, estimate,
        bound, stderr, len(norms), seed, digest, details={"ess": ess},
    )


def supermartingale_from_values(
    f_at_grid: np.ndarray,
    time_grid: np.ndarray,
    consts: TheoremConstants,
    seed: int = 0,
    digest: str = "",
) -> CheckReport:
    """Non-increase of E[exp(c t) F(r_t)] from per-replica F values at grid times.

    ``f_at_grid`` has shape (n_replicas, len(time_grid)).  Consecutive
    comparisons are paired per replica, so the two-standard-error tolerance
    applies to the mean increment.
    """
    f_at_grid = np.asarray(f_at_grid, dtype=float)
    time_grid = np.asarray(time_grid, dtype=float)
    if f_at_grid.ndim != 2 or f_at_grid.shape[1] != len(time_grid):
        raise InvalidParameterError("f_at_grid must be (n_replicas, len(time_grid))")
    n = f_at_grid.shape[0]
    scale = np.exp(consts.c * time_grid)
    values = f_at_grid * scale
    means = values.mean(axis=0)
    increments = np.diff(values, axis=1)
    inc_mean = increments.mean(axis=0)
    if n > 1:
        inc_stderr = increments.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        inc_stderr = np.zeros_like(inc_mean)
    margins = inc_mean - 2.0 * inc_stderr
    worst = float(margins.max()) if len(margins) else 0.0
    passed = bool(np.all(inc_mean <= 2.0 * inc_stderr))
    if not digest:
        digest = config_digest(
            {"check": "supermartingale", "grid": time_grid.tolist(), "n": n,
             "c": consts.c}
        )
    return CheckReport(
        "coupling_supermartingale", passed, worst, 0.0,
        float(inc_stderr.max()) if len(inc_stderr) else 0.0, n, seed, digest,
        details={
            "grid": time_grid.tolist(),
            "means": means.tolist(),
            "increment_means": inc_mean.tolist(),
            "increment_stderrs": inc_stderr.tolist(),
        },
    )


def supermartingale_check(
    coupled_runs: Sequence[CoupledTrajectory],
    consts: TheoremConstants,
    time_grid: Sequence[float],
) -> CheckReport:
    """Non-increase of E[exp(c t) F(r_t)] along the grid, within 2 stderr.

    All runs must share the discretisation grid and contain every grid time
    exactly.
    """
    if not coupled_runs:
        raise InvalidParameterError("need at least one coupled run")
    time_grid = np.asarray(sorted(time_grid), dtype=float)
    rows = []
    for run in coupled_runs:
        times = run.path_a.times
        pos = np.searchsorted(times, time_grid)
        if pos.max() >= len(times) or not np.allclose(
            times[pos], time_grid, rtol=0, atol=1e-12
        ):
            raise InvalidParameterError(
                "every time_grid entry must lie on each run's simulation grid"
            )
        rows.append(run.f_of_r[pos])
    return supermartingale_from_values(
        np.stack(rows), time_grid, consts, seed=coupled_runs[0].path_a.seed,
    )
