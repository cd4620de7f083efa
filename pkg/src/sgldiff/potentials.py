"""Gradient families and regularity checkers.

A :class:`PotentialFamily` is a set of N component gradients
``x -> grad(i, x)`` on R^d together with declared regularity constants:

* ``declared_L``   -- Lipschitz constant of every component gradient,
* ``declared_K``   -- convexity-at-infinity constant,
* ``declared_R``   -- radius beyond which the convexity inequality holds:
  ``<grad(i,x)-grad(i,y), x-y> >= K |x-y|^2`` whenever ``|x-y| >= R``.

Only gradients are exposed; none of the dynamics needs potential values.
Sampling-based checkers validate the declared constants for user-supplied
families, and a dissipativeness checker covers the weaker growth condition
``x . g(x) >= m x^2 - b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameterError, SamplingFailureError
from .rng import ANALYSIS, substream

#: Default relative tolerance used by the assumption checkers.
EPS_CHECK = 1e-6


@dataclass(frozen=True)
class PotentialFamily:
    """Indexed gradient family with declared regularity constants."""

    n_components: int
    dim: int
    grad: Callable[[int, np.ndarray], np.ndarray]
    declared_L: float
    declared_K: float
    declared_R: float
    grad_norms_at_zero: tuple[float, ...]
    name: str = "custom"
    # Optional scalar fast paths for dim == 1 (used by the simulators).
    scalar_grads: tuple[Callable[[float], float], ...] | None = None
    scalar_mean_grad: Callable[[float], float] | None = field(default=None)

    def __post_init__(self):
        if self.n_components < 1:
            raise InvalidParameterError("n_components must be >= 1")
        if self.dim < 1:
            raise InvalidParameterError("dim must be >= 1")
        if len(self.grad_norms_at_zero) != self.n_components:
            raise InvalidParameterError("grad_norms_at_zero must have one entry per component")

    def describe(self) -> dict:
        """Hashable summary used in config digests and CSV headers."""
        return {
            "name": self.name,
            "n_components": self.n_components,
            "dim": self.dim,
            "L": self.declared_L,
            "K": self.declared_K,
            "R": self.declared_R,
            "grad_norms_at_zero": list(self.grad_norms_at_zero),
        }


@dataclass(frozen=True)
class AssumptionReport:
    """Result of a sampling-based regularity check."""

    assumption_id: str  # "Lipschitz" | "ConvexAtInfinity" | "Dissipative"
    passed: bool
    worst_ratio: float
    witness: tuple[np.ndarray, np.ndarray] | None
    n_samples: int


def mean_gradient(family: PotentialFamily, x: np.ndarray) -> np.ndarray:
    """Arithmetic mean of the component gradients at ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (family.dim,):
        raise InvalidParameterError(f"point has shape {x.shape}, expected ({family.dim},)")
    if family.n_components == 1:
        return np.asarray(family.grad(0, x), dtype=float)
    total = np.zeros(family.dim)
    for i in range(family.n_components):
        total += family.grad(i, x)
    return total / family.n_components


def make_quadratic_family(
    a: Sequence[float],
    b: Sequence[float],
    dim: int = 1,
    radius: float = 1e-2,
) -> PotentialFamily:
    """Linear-gradient family ``grad(i, x) = a_i (x - b_i 1)``.

    Component i has the strongly convex quadratic gradient with curvature
    ``a_i`` centred at ``b_i`` along the diagonal.  Strong convexity holds
    globally, so ``declared_R`` is an arbitrary positive value (``radius``).
    """
    a = tuple(float(v) for v in a)
    b = tuple(float(v) for v in b)
    if len(a) != len(b):
        raise InvalidParameterError("a and b must have the same length")
    if not a:
        raise InvalidParameterError("need at least one component")
    if any(v <= 0 for v in a):
        raise InvalidParameterError("all curvatures a_i must be positive")
    if radius <= 0:
        raise InvalidParameterError("radius must be positive")
    n = len(a)
    ab = tuple(ai * bi for ai, bi in zip(a, b))

    def grad(i: int, x: np.ndarray) -> np.ndarray:
        return a[i] * (np.asarray(x, dtype=float) - b[i])

    scalar_grads = tuple(
        (lambda x, ai=ai, abi=abi: ai * x - abi) for ai, abi in zip(a, ab)
    )
    if n == 1:
        scalar_mean = scalar_grads[0]
    else:
        a_bar = math.fsum(a) / n
        ab_bar = math.fsum(ab) / n
        scalar_mean = lambda x, a_bar=a_bar, ab_bar=ab_bar: a_bar * x - ab_bar

    return PotentialFamily(
        n_components=n,
        dim=dim,
        grad=grad,
        declared_L=max(a),
        declared_K=min(a),
        declared_R=float(radius),
        grad_norms_at_zero=tuple(ai * abs(bi) * math.sqrt(dim) for ai, bi in zip(a, b)),
        name="quadratic",
        scalar_grads=scalar_grads if dim == 1 else None,
        scalar_mean_grad=scalar_mean if dim == 1 else None,
    )


def make_trig_family(shifts: Sequence[float], dim: int = 1) -> PotentialFamily:
    """Non-convex family ``g_i(x) = (x - m_i 1) - sin(x - m_i 1)`` componentwise.

    Each component is non-convex (the derivative 1 - cos vanishes on a
    lattice) but convex at infinity.  In one dimension, |sin u - sin v| <=
    min(2, |u - v|) gives L = 2 and, for |x - y| >= 4,
    <dg, dx> >= |dx|^2 - 2|dx| >= |dx|^2 / 2, hence K = 1/2 with R = 4.
    For dim > 1 the same argument gives <dg, dx> >= |dx|^2 - 2 sqrt(dim) |dx|,
    so the radius is declared as ``4 sqrt(dim)``; the checkers confirm the
    constants empirically at construction time in the test suite.
    """
    shifts = tuple(float(v) for v in shifts)
    if not shifts:
        raise InvalidParameterError("need at least one component")
    if dim < 1:
        raise InvalidParameterError("dim must be >= 1")
    n = len(shifts)

    def grad(i: int, x: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=float) - shifts[i]
        return u - np.sin(u)

    scalar_grads = tuple(
        (lambda x, m=m: (x - m) - math.sin(x - m)) for m in shifts
    )
    if n == 1:
        scalar_mean = scalar_grads[0]
    else:
        def scalar_mean(x: float) -> float:
            return math.fsum((x - m) - math.sin(x - m) for m in shifts) / n

    return PotentialFamily(
        n_components=n,
        dim=dim,
        grad=grad,
        declared_L=2.0,
        declared_K=0.5,
        declared_R=4.0 * math.sqrt(dim),
        grad_norms_at_zero=tuple(abs(math.sin(m) - m) * math.sqrt(dim) for m in shifts),
        name="trig",
        scalar_grads=scalar_grads if dim == 1 else None,
        scalar_mean_grad=scalar_mean if dim == 1 else None,
    )


def wrap_gradient_1d(
    g: Callable[[float], float],
    declared_L: float,
    declared_K: float,
    declared_R: float,
    name: str = "custom-1d",
) -> PotentialFamily:
    """Wrap a scalar derivative as a single-component 1-D family."""

    def grad(i: int, x: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([g(float(x[0]))])

    return PotentialFamily(
        n_components=1,
        dim=1,
        grad=grad,
        declared_L=declared_L,
        declared_K=declared_K,
        declared_R=declared_R,
        grad_norms_at_zero=(abs(g(0.0)),),
        name=name,
        scalar_grads=(g,),
        scalar_mean_grad=g,
    )


def make_appendix_c_derivative() -> Callable[[float], float]:
    """Odd piecewise derivative that is dissipative but not convex at infinity.

    On [0, 2] the function is the identity.  For 2^n <= x < 2^(n+1) with
    n >= 1 it is constant 2^n on the plateau [2^n, 2^n + log n] and then
    linear up to 2^(n+1) at the next power of two.  Natural logarithm; for
    n = 1 the plateau has zero length.  Satisfies x/2 <= g(x) <= x for
    x >= 0, hence (1/2, 0)-dissipativeness, while the plateaus give
    g(x) - g(y) = 0 for far-apart pairs.
    """

    def phi_prime(x: float) -> float:
        if x < 0.0:
            return -phi_prime(-x)
        if x <= 2.0:
            return x
        n = int(math.floor(math.log2(x)))
        lo = 2.0 ** n
        log_n = math.log(n)
        plateau_end = lo + log_n
        if x <= plateau_end:
            return lo
        return lo / (lo - log_n) * (x - plateau_end) + lo

    return phi_prime


def _sample_box(rng: np.random.Generator, n: int, dim: int, radius: float,
                center: np.ndarray) -> np.ndarray:
    return center + rng.uniform(-radius, radius, size=(n, dim))


def check_assumption1(
    family: PotentialFamily,
    n_pairs: int,
    box_radius: float,
    seed: int,
    eps_check: float = EPS_CHECK,
    center: Sequence[float] | None = None,
) -> AssumptionReport:
    """Sampled check of the Lipschitz bound ``|dg| <= L |dx|``.

    Draws uniform pairs from the box ``center + [-box_radius, box_radius]^d``
    and reports the largest ratio |grad(i,x)-grad(i,y)| / |x-y| over all
    components.  Degenerate pairs (x == y) are resampled.
    """
    if n_pairs < 1:
        raise InvalidParameterError("n_pairs must be >= 1")
    if box_radius <= 0:
        raise InvalidParameterError("box_radius must be positive")
    c = np.zeros(family.dim) if center is None else np.asarray(center, dtype=float)
    rng = substream(seed, ANALYSIS)
    xs = _sample_box(rng, n_pairs, family.dim, box_radius, c)
    ys = _sample_box(rng, n_pairs, family.dim, box_radius, c)
    worst = -np.inf
    witness = None
    for k in range(n_pairs):
        x, y = xs[k], ys[k]
        dist = float(np.linalg.norm(x - y))
        while dist == 0.0:
            y = c + rng.uniform(-box_radius, box_radius, size=family.dim)
            dist = float(np.linalg.norm(x - y))
        for i in range(family.n_components):
            ratio = float(np.linalg.norm(family.grad(i, x) - family.grad(i, y))) / dist
            if ratio > worst:
                worst = ratio
                witness = (x.copy(), y.copy())
    passed = worst <= family.declared_L * (1.0 + eps_check)
    return AssumptionReport("Lipschitz", passed, worst, witness, n_pairs)


def check_assumption2(
    family: PotentialFamily,
    n_pairs: int,
    box_radius: float,
    seed: int,
    eps_check: float = EPS_CHECK,
    center: Sequence[float] | None = None,
    max_tries: int = 200,
) -> AssumptionReport:
    """Sampled check of convexity at infinity.

    Pairs are drawn from the box and rejected until ``|x-y| >= declared_R``;
    the reported statistic is the smallest ratio
    ``<dg, dx> / |dx|^2`` over components and accepted pairs.
    """
    if n_pairs < 1:
        raise InvalidParameterError("n_pairs must be >= 1")
    if 2.0 * box_radius * math.sqrt(family.dim) <= family.declared_R:
        raise InvalidParameterError(
            "box_radius too small: no pair in the box can satisfy |x-y| >= R"
        )
    c = np.zeros(family.dim) if center is None else np.asarray(center, dtype=float)
    rng = substream(seed, ANALYSIS)
    worst = np.inf
    witness = None
    accepted = 0
    for _ in range(max_tries):
        xs = _sample_box(rng, n_pairs, family.dim, box_radius, c)
        ys = _sample_box(rng, n_pairs, family.dim, box_radius, c)
        dists = np.linalg.norm(xs - ys, axis=1)
        ok = dists >= family.declared_R
        for k in np.flatnonzero(ok):
            if accepted == n_pairs:
                break
            x, y = xs[k], ys[k]
            dx = x - y
            d2 = float(dists[k]) ** 2
            for i in range(family.n_components):
                ratio = float(np.dot(family.grad(i, x) - family.grad(i, y), dx)) / d2
                if ratio < worst:
                    worst = ratio
                    witness = (x.copy(), y.copy())
            accepted += 1
        if accepted == n_pairs:
            break
    if accepted < n_pairs:
        raise SamplingFailureError(
            f"could not draw {n_pairs} pairs with |x-y| >= {family.declared_R} "
            f"from a box of radius {box_radius} (got {accepted})"
        )
    passed = worst >= family.declared_K * (1.0 - eps_check)
    return AssumptionReport("ConvexAtInfinity", passed, worst, witness, n_pairs)


def check_dissipativeness(
    grad: Callable[[float], float],
    m: float,
    b: float,
    grid: Sequence[float],
) -> AssumptionReport:
    """Grid check of ``x g(x) >= m x^2 - b`` for a 1-D gradient.

    ``worst_ratio`` is the smallest margin ``x g(x) - (m x^2 - b)`` over the
    grid; the check passes iff it is nonnegative.
    """
    if m <= 0:
        raise InvalidParameterError("m must be positive")
    if b < 0:
        raise InvalidParameterError("b must be nonnegative")
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise InvalidParameterError("grid must be non-empty")
    worst = np.inf
    witness = None
    for x in grid:
        margin = x * grad(float(x)) - (m * x * x - b)
        if margin < worst:
            worst = float(margin)
            witness = (np.array([x]), np.array([x]))
    return AssumptionReport("Dissipative", worst >= 0.0, worst, witness, int(grid.size))
