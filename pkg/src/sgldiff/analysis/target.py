"""Normalised 1-D target density recovered from a gradient family.

The stationary density of the mean-field diffusion is proportional to
``exp(-Phi)`` where ``Phi`` is a potential for the mean gradient.  ``Phi``
is recovered by integrating the mean gradient from the anchor 0 (the
additive constant is absorbed by the normaliser).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from ..errors import DomainTooSmallError, InvalidParameterError
from ..potentials import PotentialFamily, mean_gradient

# 5-point Gauss-Legendre nodes/weights on [-1, 1].
_GL_NODES = np.array([
    -0.906179845938664, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.906179845938664,
])
_GL_WEIGHTS = np.array([
    0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
    0.47862867049936647, 0.23692688505618908,
])


@dataclass(frozen=True)
class TargetDensity1D:
    """Tabulated normalised density with a quantile table."""

    grid: np.ndarray
    neg_potential: np.ndarray  # -Phi on the grid, anchored at Phi(0) = 0
    density: np.ndarray
    z: float
    quantile_p: np.ndarray
    quantile_x: np.ndarray

    def unnormalized_log_density(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.grid, self.neg_potential)

    def pdf(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.grid, self.density)

    def quantile(self, p) -> np.ndarray:
        return np.interp(np.asarray(p, dtype=float), self.quantile_p, self.quantile_x)

    def w1_to_samples(self, samples) -> float:
        """W1 between an empirical law and this density, by quantile comparison."""
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        p = (np.arange(len(s)) + 0.5) / len(s)
        return float(np.mean(np.abs(s - self.quantile(p))))


def build_target_density_1d(
    family: PotentialFamily,
    domain: tuple[float, float],
    n_grid: int = 8192,
    n_quantiles: int = 4096,
    tail_tol: float = 1e-12,
) -> TargetDensity1D:
    """Tabulate the normalised target density of a 1-D family.

    The potential is accumulated over the grid with per-interval 5-point
    Gauss-Legendre quadrature of the mean gradient; the normaliser uses
    Simpson's rule.  Raises :class:`DomainTooSmallError` when the density
    has not decayed below ``tail_tol`` of its maximum at the domain ends.
    """
    if family.dim != 1:
        raise InvalidParameterError("target density tabulation requires dim == 1")
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise InvalidParameterError("domain must be a nonempty interval")
    if n_grid % 2 == 1:
        n_grid += 1  # Simpson wants an even interval count
    grid = np.linspace(lo, hi, n_grid + 1)

    if family.scalar_mean_grad is not None:
        gbar = family.scalar_mean_grad
    else:
        gbar = lambda x: float(mean_gradient(family, np.array([x]))[0])

    # Per-interval Gauss-Legendre integrals of the mean gradient.
    h = np.diff(grid)
    mids = (grid[:-1] + grid[1:]) / 2.0
    seg = np.zeros(n_grid)
    for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
        pts = mids + (h / 2.0) * node
        vals = np.array([gbar(float(p)) for p in pts])
        seg += weight * vals
    seg *= h / 2.0
    phi = np.concatenate(([0.0], np.cumsum(seg)))
    # Anchor at x = 0 when it lies inside the domain, else at the minimum.
    if lo <= 0.0 <= hi:
        phi -= np.interp(0.0, grid, phi)
    phi -= phi.min()

    unnorm = np.exp(-phi)
    z = float(simpson(unnorm, x=grid))
    if not math.isfinite(z) or z <= 0:
        raise DomainTooSmallError("potential integration produced a non-normalisable density")
    density = unnorm / z
    peak = float(density.max())
    if density[0] > tail_tol * peak or density[-1] > tail_tol * peak:
        raise DomainTooSmallError(
            "density has not decayed at the domain ends; enlarge the domain"
        )

    cdf = np.concatenate(([0.0], np.cumsum((density[:-1] + density[1:]) / 2.0 * h)))
    cdf /= cdf[-1]
    # Strictly increasing section for a well-defined inverse.
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    p_grid = (np.arange(n_quantiles) + 0.5) / n_quantiles
    quantile_x = np.interp(p_grid, cdf[keep], grid[keep])
    return TargetDensity1D(grid, -phi, density, z, p_grid, quantile_x)
