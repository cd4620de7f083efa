"""Wasserstein-1 estimators for empirical laws.

In one dimension the W1 distance between empirical measures is exact: for
equal sample sizes it is the mean absolute difference of sorted samples, and
in general the integral of the absolute CDF difference over the pooled
support.  For d > 1 a sliced estimate averages the exact 1-D cost over
random unit directions (a documented proxy for W1, not W1 itself).

Helpers quantify the resolution of these estimates: the same-law noise
floor of the empirical W1 (Brownian-bridge asymptotics), an effective
sample size for autocorrelated chains, and bootstrap standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ..errors import InvalidParameterError
from ..rng import ANALYSIS, substream

EXACT_1D = "exact_1d"
SLICED = "sliced"
QUANTILE_VS_GAUSSIAN = "quantile_vs_gaussian"


@dataclass(frozen=True)
class WassersteinEstimate:
    value: float
    method: str
    n_a: int
    n_b: int
    n_projections: int | None = None
    stderr: float | None = None


def _as_1d(samples, name: str) -> np.ndarray:
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidParameterError(f"{name} must be non-empty")
    return arr


def _w1_sorted(a: np.ndarray, b: np.ndarray) -> float:
    """Exact empirical W1 for pre-sorted 1-D samples."""
    if len(a) == len(b):
        return float(np.mean(np.abs(a - b)))
    allv = np.concatenate([a, b])
    allv.sort(kind="mergesort")
    fa = np.searchsorted(a, allv, side="right") / len(a)
    fb = np.searchsorted(b, allv, side="right") / len(b)
    return float(np.sum(np.abs(fa[:-1] - fb[:-1]) * np.diff(allv)))


def wasserstein1_1d(samples_a, samples_b) -> WassersteinEstimate:
    """Exact W1 between two 1-D empirical measures."""
    a = np.sort(_as_1d(samples_a, "samples_a"))
    b = np.sort(_as_1d(samples_b, "samples_b"))
    return WassersteinEstimate(_w1_sorted(a, b), EXACT_1D, len(a), len(b))


def wasserstein1_sliced(samples_a, samples_b, n_projections: int, seed: int = 0) -> WassersteinEstimate:
    """Sliced W1: mean exact 1-D cost over uniform random unit directions.

    A lower-bound-flavoured proxy for the d-dimensional W1 (it equals W1
    only in one dimension).  The spread across directions is reported as
    ``stderr``.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.size == 0 or b.size == 0:
        raise InvalidParameterError("sample sets must be non-empty")
    if a.shape[1] != b.shape[1]:
        raise InvalidParameterError("sample sets have different dimensions")
    if n_projections < 1:
        raise InvalidParameterError("n_projections must be >= 1")
    d = a.shape[1]
    rng = substream(seed, ANALYSIS)
    dirs = rng.standard_normal((n_projections, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    vals = np.empty(n_projections)
    for k in range(n_projections):
        pa = np.sort(a @ dirs[k])
        pb = np.sort(b @ dirs[k])
        vals[k] = _w1_sorted(pa, pb)
    stderr = float(vals.std(ddof=1) / math.sqrt(n_projections)) if n_projections > 1 else 0.0
    return WassersteinEstimate(
        float(vals.mean()), SLICED, len(a), len(b), n_projections, stderr
    )


def wasserstein1_vs_gaussian(samples, mean: float, variance: float) -> WassersteinEstimate:
    """W1 between an empirical law and a Gaussian, by quantile comparison.

    Midpoint rule on the n sample quantiles: the k-th order statistic is
    compared with the Gaussian quantile at (k + 1/2) / n.
    """
    if variance <= 0:
        raise InvalidParameterError("variance must be positive")
    s = np.sort(_as_1d(samples, "samples"))
    p = (np.arange(len(s)) + 0.5) / len(s)
    q = mean + math.sqrt(variance) * ndtri(p)
    return WassersteinEstimate(float(np.mean(np.abs(s - q))), QUANTILE_VS_GAUSSIAN, len(s), 0)


def exact_matching_w1(samples_a, samples_b) -> float:
    """Exact W1 between small equal-size point clouds via optimal assignment.

    Cross-check oracle for the sliced estimator; O(n^3), limited to n <= 256.
    """
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if len(a) != len(b):
        raise InvalidParameterError("exact matching needs equal sample sizes")
    if len(a) > 256:
        raise InvalidParameterError("exact matching limited to n <= 256")
    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


def effective_sample_size(x) -> float:
    """ESS of a scalar chain via the initial-positive-sequence estimator.

    Sums autocovariances of consecutive lag pairs until a pair sum turns
    nonpositive (Geyer's rule for reversible chains).
    """
    x = _as_1d(x, "x")
    n = len(x)
    if n < 4:
        return float(n)
    xc = x - x.mean()
    var = float(np.dot(xc, xc) / n)
    if var == 0.0:
        return float(n)
    max_lag = min(n - 2, 2000)
    acov = np.array(
        [np.dot(xc[: n - lag], xc[lag:]) / n for lag in range(max_lag + 1)]
    )
    rho = acov / var
    tau = 1.0
    for k in range(1, max_lag, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return float(n / tau)


def w1_noise_floor(reference, n_a_eff: float, n_b_eff: float) -> float:
    """Expected same-law empirical W1 between samples of these effective sizes.

    Asymptotically E[W1(F_n, F_m)] ~ sqrt(1/n + 1/m) * integral
    sqrt(2 F (1-F) / pi) dx; the integral is estimated from the reference
    sample's empirical CDF.
    """
    ref = np.sort(_as_1d(reference, "reference"))
    m = len(ref)
    u = np.arange(1, m) / m
    kappa = float(np.sum(np.sqrt(2.0 * u * (1.0 - u) / math.pi) * np.diff(ref)))
    return kappa * math.sqrt(1.0 / n_a_eff + 1.0 / n_b_eff)


def bootstrap_w1_stderr(
    samples: np.ndarray,
    reference: np.ndarray,
    n_boot: int = 200,
    seed: int = 0,
    ref_block: int | None = None,
    n_boot_ref: int = 50,
) -> float:
    """Bootstrap standard error of ``wasserstein1_1d(samples, reference)``.

    Resamples ``samples`` iid; optionally also resamples the reference by
    circular blocks of ``ref_block`` entries (for autocorrelated reference
    chains) and combines the two spreads in quadrature.
    """
    rng = substream(seed, ANALYSIS, 1)
    s = np.asarray(samples, dtype=float).ravel()
    ref_sorted = np.sort(np.asarray(reference, dtype=float).ravel())
    vals = np.empty(n_boot)
    for k in range(n_boot):
        pick = rng.integers(len(s), size=len(s))
        vals[k] = _w1_sorted(np.sort(s[pick]), ref_sorted)
    var = float(vals.var(ddof=1))
    if ref_block is not None and n_boot_ref > 0:
        ref = np.asarray(reference, dtype=float).ravel()
        m = len(ref)
        n_blocks = int(math.ceil(m / ref_block))
        s_sorted = np.sort(s)
        ref_vals = np.empty(n_boot_ref)
        for k in range(n_boot_ref):
            starts = rng.integers(m, size=n_blocks)
            idx = (starts[:, None] + np.arange(ref_block)[None, :]).ravel() % m
            ref_vals[k] = _w1_sorted(s_sorted, np.sort(ref[idx[:m]]))
        var += float(ref_vals.var(ddof=1))
    return math.sqrt(var)
