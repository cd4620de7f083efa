"""Simulators for the switched Langevin diffusion and its relatives.

Processes
---------
* ``sample_index_path``          -- the continuous-time index jump process
* ``simulate_sgldiff``           -- switched diffusion, one component gradient
  active at a time, index redrawn after exponential waiting times
* ``simulate_langevin``          -- limiting diffusion driven by the mean gradient
* ``ula_chain`` / ``sgld_chain`` -- Euler-Maruyama chains (full / subsampled gradient)
* ``simulate_synchronous_pair``  -- switched and limiting diffusion sharing noise
* ``simulate_reflection_coupling`` -- two switched diffusions with reflected noise

Time discretisation is Euler-Maruyama on a uniform grid refined to include
every index jump time exactly, so each step sees a single active component.
All simulators are deterministic functions of their arguments and a seed:
index jumps, diffusion noise, and bridge tests consume disjoint substreams
(see :mod:`sgldiff.rng`).

Index-process convention: redraw events occur at rate ``N / eta`` in
process time with a uniform target (self-redraws collapsed), equivalently a
jump to each specific other state at rate ``1 / eta``.  The associated
semigroup relaxes at rate ``N / eta``.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import DivergenceError, InvalidParameterError
from .potentials import PotentialFamily, mean_gradient
from .rng import BRIDGE, INDEX, NOISE, substream


@dataclass(frozen=True)
class IndexProcessPath:
    """Realisation of the index jump process on the diffusion time scale.

    ``states[k]`` is active on ``[jump_times[k], jump_times[k+1])`` (the last
    state up to ``horizon``).  ``jump_times[0] == 0`` and consecutive states
    differ; self-redraws are collapsed.
    """

    jump_times: np.ndarray
    states: np.ndarray
    eta: float
    n_components: int
    horizon: float

    def states_at(self, times: np.ndarray) -> np.ndarray:
        """Active component at each query time (right-continuous)."""
        pos = np.searchsorted(self.jump_times, times, side="right") - 1
        return self.states[np.maximum(pos, 0)]

    @property
    def n_switches(self) -> int:
        return len(self.jump_times) - 1

    def occupation_fractions(self) -> np.ndarray:
        """Fraction of [0, horizon] spent in each state."""
        bounds = np.append(self.jump_times, self.horizon)
        lengths = np.diff(bounds)
        out = np.zeros(self.n_components)
        np.add.at(out, self.states, lengths)
        return out / self.horizon


@dataclass(frozen=True)
class Trajectory:
    """Discretised sample path with seed and configuration provenance.

    ``index_annotation[k]`` is the component active on the step starting at
    ``times[k]`` (the final entry repeats the last step); ``None`` for
    processes without an index.
    """

    times: np.ndarray
    points: np.ndarray
    index_annotation: np.ndarray | None
    seed: int
    config_digest: str

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def uniform_mask(self, dt: float) -> np.ndarray:
        """Marks entries lying on the uniform grid (excludes inserted jump times)."""
        wall = _wall_grid(self.horizon, dt)
        return np.isin(self.times, wall)

    def samples_after(self, burn_in: float, dt: float | None = None) -> np.ndarray:
        """States at uniform grid times > ``burn_in`` (equal time weights)."""
        keep = self.times > burn_in
        if dt is not None:
            keep &= self.uniform_mask(dt)
        return self.points[keep]


@dataclass(frozen=True)
class CoupledTrajectory:
    """A pair of paths under a coupling, with the distance process."""

    path_a: Trajectory
    path_b: Trajectory
    r: np.ndarray
    f_of_r: np.ndarray
    meeting_time: float | None


def config_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def sample_index_path(
    n_components: int,
    eta: float,
    horizon: float,
    seed: int | None = None,
    initial_state: int | None = None,
    rng: np.random.Generator | None = None,
) -> IndexProcessPath:
    """Simulate the index jump process over ``[0, horizon]`` in diffusion time.

    ``initial_state=None`` draws the initial component uniformly.  Pass an
    explicit ``rng`` to embed the path in a larger stream layout.
    """
    if n_components < 1:
        raise InvalidParameterError("n_components must be >= 1")
    if eta <= 0 or horizon < 0:
        raise InvalidParameterError("eta must be positive and horizon nonnegative")
    if rng is None:
        rng = substream(0 if seed is None else seed, INDEX)
    if initial_state is None:
        first = int(rng.integers(n_components)) if n_components > 1 else 0
    else:
        if not 0 <= initial_state < n_components:
            raise InvalidParameterError("initial_state out of range")
        first = int(initial_state)
    if n_components == 1 or horizon == 0.0:
        return IndexProcessPath(
            jump_times=np.array([0.0]),
            states=np.array([first], dtype=np.int64),
            eta=eta,
            n_components=n_components,
            horizon=horizon,
        )
    scale = eta / n_components  # mean gap between redraw events
    times = [np.zeros(1)]
    states = [np.array([first], dtype=np.int64)]
    t = 0.0
    current = first
    block = min(4_000_000, max(1024, int(1.2 * horizon / scale) + 16))
    while True:
        gaps = rng.exponential(scale, size=block)
        targets = rng.integers(n_components, size=block)
        event_times = t + np.cumsum(gaps)
        changed = np.flatnonzero(
            np.concatenate(([targets[0] != current], np.diff(targets) != 0))
        )
        visible = changed[event_times[changed] < horizon]
        times.append(event_times[visible])
        states.append(targets[visible].astype(np.int64))
        if event_times[-1] >= horizon:
            break
        t = float(event_times[-1])
        current = int(targets[-1])
    return IndexProcessPath(
        jump_times=np.concatenate(times),
        states=np.concatenate(states),
        eta=eta,
        n_components=n_components,
        horizon=horizon,
    )


def _wall_grid(horizon: float, dt: float) -> np.ndarray:
    """Uniform grid 0, dt, 2dt, ... ending exactly at ``horizon``."""
    if horizon < 0 or dt <= 0:
        raise InvalidParameterError("need horizon >= 0 and dt > 0")
    if horizon == 0.0:
        return np.zeros(1)
    m = int(math.ceil(horizon / dt - 1e-9))
    grid = dt * np.arange(m, dtype=float)
    return np.append(grid, horizon)


def _refined_times(horizon: float, dt: float, inner: np.ndarray | None) -> np.ndarray:
    wall = _wall_grid(horizon, dt)
    if inner is None or len(inner) == 0:
        return wall
    inner = inner[(inner > 0.0) & (inner < horizon)]
    return np.union1d(wall, inner)


def _validate_x0(x0, dim: int) -> np.ndarray:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (dim,):
        raise InvalidParameterError(f"x0 has shape {x0.shape}, expected ({dim},)")
    return x0


def _first_bad_time(times: np.ndarray, points: np.ndarray) -> float | None:
    finite = np.isfinite(points).all(axis=1)
    if finite.all():
        return None
    return float(times[int(np.argmin(finite))])


def _check_step_warnings(family: PotentialFamily, eta: float | None, dt: float) -> None:
    if eta is not None and dt > eta / family.n_components:
        warnings.warn(
            f"dt={dt:g} exceeds eta/N={eta / family.n_components:g}; the grid is "
            "refined at jump times but the uniform grid under-resolves switching",
            stacklevel=3,
        )
    if family.declared_L > 0 and dt > 1.0 / (2.0 * family.declared_L):
        warnings.warn(
            f"dt={dt:g} exceeds 1/(2L)={1.0 / (2.0 * family.declared_L):g}; "
            "the explicit scheme may be unstable",
            stacklevel=3,
        )


def _em_drive(
    family: PotentialFamily,
    x0: np.ndarray,
    times: np.ndarray,
    step_index: np.ndarray | None,
    increments: np.ndarray,
    digest: str,
    seed: int,
) -> Trajectory:
    """Euler-Maruyama over a fixed grid; ``step_index=None`` drives the mean field."""
    n = len(times) - 1
    d = len(x0)
    steps = np.diff(times)
    use_scalar = d == 1 and family.scalar_grads is not None
    points = np.empty((n + 1, d))
    points[0] = x0
    if use_scalar:
        grads = family.scalar_grads
        gmean = family.scalar_mean_grad
        x = float(x0[0])
        out = points[:, 0]
        hl = steps.tolist()
        wl = increments[:, 0].tolist()
        if step_index is None:
            for k, (h, w) in enumerate(zip(hl, wl)):
                x = x - h * gmean(x) + w
                out[k + 1] = x
        else:
            il = step_index.tolist()
            for k, (h, w, i) in enumerate(zip(hl, wl, il)):
                x = x - h * grads[i](x) + w
                out[k + 1] = x
    else:
        x = x0.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(n):
                if step_index is None:
                    g = mean_gradient(family, x)
                else:
                    g = family.grad(int(step_index[k]), x)
                x = x - steps[k] * g + increments[k]
                points[k + 1] = x
    bad = _first_bad_time(times, points)
    if bad is not None:
        raise DivergenceError(f"state became non-finite at t={bad:g}", bad)
    annotation = None
    if step_index is not None:
        annotation = np.append(step_index, step_index[-1] if n else 0)
    return Trajectory(times, points, annotation, seed, digest)


def simulate_sgldiff(
    family: PotentialFamily,
    eta: float,
    x0,
    horizon: float,
    dt: float = 1e-3,
    seed: int = 0,
    index_path: IndexProcessPath | None = None,
    extra_times: Sequence[float] | None = None,
) -> Trajectory:
    """Switched diffusion: drift from one component at a time, unit-rate switching
    slowed by ``eta``, additive noise of intensity sqrt(2).
    """
    x0 = _validate_x0(x0, family.dim)
    _check_step_warnings(family, eta, dt)
    if index_path is None:
        index_path = sample_index_path(
            family.n_components, eta, horizon, rng=substream(seed, INDEX)
        )
    inner = index_path.jump_times[1:]
    if extra_times is not None:
        inner = np.union1d(inner, np.asarray(extra_times, dtype=float))
    times = _refined_times(horizon, dt, inner)
    step_index = index_path.states_at(times[:-1])
    rng_noise = substream(seed, NOISE)
    steps = np.diff(times)
    increments = np.sqrt(2.0 * steps)[:, None] * rng_noise.standard_normal(
        (len(steps), family.dim)
    )
    digest = config_digest(
        {
            "process": "sgldiff",
            "family": family.describe(),
            "eta": eta,
            "x0": x0.tolist(),
            "horizon": horizon,
            "dt": dt,
            "seed": seed,
        }
    )
    return _em_drive(family, x0, times, step_index, increments, digest, seed)


def simulate_langevin(
    family: PotentialFamily,
    x0,
    horizon: float,
    dt: float = 1e-3,
    seed: int = 0,
    extra_times: Sequence[float] | None = None,
) -> Trajectory:
    """Limiting diffusion driven by the mean gradient (no index process)."""
    x0 = _validate_x0(x0, family.dim)
    _check_step_warnings(family, None, dt)
    inner = None
    if extra_times is not None:
        inner = np.asarray(extra_times, dtype=float)
    times = _refined_times(horizon, dt, inner)
    rng_noise = substream(seed, NOISE)
    steps = np.diff(times)
    increments = np.sqrt(2.0 * steps)[:, None] * rng_noise.standard_normal(
        (len(steps), family.dim)
    )
    digest = config_digest(
        {
            "process": "langevin",
            "family": family.describe(),
            "x0": x0.tolist(),
            "horizon": horizon,
            "dt": dt,
            "seed": seed,
        }
    )
    return _em_drive(family, x0, times, None, increments, digest, seed)


def _chain(
    family: PotentialFamily,
    step: float,
    x0,
    n_steps: int,
    seed: int,
    noise: np.ndarray | None,
    indices: np.ndarray | None,
    subsampled: bool,
    name: str,
) -> Trajectory:
    x0 = _validate_x0(x0, family.dim)
    if step <= 0:
        raise InvalidParameterError("step must be positive")
    if n_steps < 0:
        raise InvalidParameterError("n_steps must be >= 0")
    if subsampled and indices is None:
        rng_index = substream(seed, INDEX)
        indices = rng_index.integers(family.n_components, size=n_steps).astype(np.int64)
    if indices is not None:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.shape != (n_steps,):
            raise InvalidParameterError("indices must have one entry per step")
    if noise is None:
        rng_noise = substream(seed, NOISE)
        noise = rng_noise.standard_normal((n_steps, family.dim))
    else:
        noise = np.asarray(noise, dtype=float)
        if noise.shape != (n_steps, family.dim):
            raise InvalidParameterError(f"noise must have shape ({n_steps}, {family.dim})")
    times = step * np.arange(n_steps + 1, dtype=float)
    increments = math.sqrt(2.0 * step) * noise
    digest = config_digest(
        {
            "process": name,
            "family": family.describe(),
            "step": step,
            "x0": x0.tolist(),
            "n_steps": n_steps,
            "seed": seed,
        }
    )
    return _em_drive(family, x0, times, indices, increments, digest, seed)


def ula_chain(
    family: PotentialFamily,
    step: float,
    x0,
    n_steps: int,
    seed: int = 0,
    noise: np.ndarray | None = None,
) -> Trajectory:
    """Euler-Maruyama chain with the full mean gradient each step.

    ``noise`` injects the per-step standard normals (test hook; pass zeros
    for the deterministic gradient map).
    """
    return _chain(family, step, x0, n_steps, seed, noise, None, False, "ula")


def sgld_chain(
    family: PotentialFamily,
    step: float,
    x0,
    n_steps: int,
    seed: int = 0,
    noise: np.ndarray | None = None,
    indices: np.ndarray | None = None,
) -> Trajectory:
    """Subsampled chain: a fresh uniform component gradient each step.

    ``indices`` forces the component sequence (test hook).
    """
    return _chain(family, step, x0, n_steps, seed, noise, indices, True, "sgld")


def simulate_synchronous_pair(
    family: PotentialFamily,
    eta: float,
    x0,
    horizon: float,
    dt: float = 1e-3,
    seed: int = 0,
) -> CoupledTrajectory:
    """Switched and limiting diffusion driven by identical noise increments.

    Both start at ``x0``; the distance process measures the strong
    (pathwise) subsampling error.  Not a contraction coupling, so
    ``meeting_time`` is never set.
    """
    x0 = _validate_x0(x0, family.dim)
    _check_step_warnings(family, eta, dt)
    index_path = sample_index_path(
        family.n_components, eta, horizon, rng=substream(seed, INDEX)
    )
    times = _refined_times(horizon, dt, index_path.jump_times[1:])
    step_index = index_path.states_at(times[:-1])
    steps = np.diff(times)
    rng_noise = substream(seed, NOISE)
    increments = np.sqrt(2.0 * steps)[:, None] * rng_noise.standard_normal(
        (len(steps), family.dim)
    )
    digest = config_digest(
        {
            "process": "synchronous-pair",
            "family": family.describe(),
            "eta": eta,
            "x0": x0.tolist(),
            "horizon": horizon,
            "dt": dt,
            "seed": seed,
        }
    )
    path_a = _em_drive(family, x0, times, step_index, increments, digest, seed)
    path_b = _em_drive(family, x0, times, None, increments, digest, seed)
    r = np.linalg.norm(path_a.points - path_b.points, axis=1)
    f = distance_profile(r, family.declared_L, family.declared_R)
    return CoupledTrajectory(path_a, path_b, r, f, None)


def simulate_reflection_coupling(
    family: PotentialFamily,
    eta: float,
    x0,
    y0,
    horizon: float,
    dt: float = 1e-3,
    eps_meet: float = 1e-6,
    seed: int = 0,
    bridge_detection: bool = True,
    index_path: IndexProcessPath | None = None,
    extra_times: Sequence[float] | None = None,
) -> CoupledTrajectory:
    """Two switched diffusions sharing the index process, with reflected noise.

    Until the paths meet, the second path receives the increment
    ``(I - 2 e e^T) dB`` with ``e`` the unit vector between the states; the
    difference then diffuses as a one-dimensional Brownian motion with the
    drift gap.  Meeting is declared when the distance falls below
    ``eps_meet`` at a grid point or, with ``bridge_detection`` (default), when
    a Brownian-bridge test detects a sub-step crossing of zero; afterwards the
    paths are merged exactly.
    """
    x0 = _validate_x0(x0, family.dim)
    y0 = _validate_x0(y0, family.dim)
    if eps_meet <= 0:
        raise InvalidParameterError("eps_meet must be positive")
    _check_step_warnings(family, eta, dt)
    if index_path is None:
        index_path = sample_index_path(
            family.n_components, eta, horizon, rng=substream(seed, INDEX)
        )
    inner = index_path.jump_times[1:]
    if extra_times is not None:
        inner = np.union1d(inner, np.asarray(extra_times, dtype=float))
    times = _refined_times(horizon, dt, inner)
    step_index = index_path.states_at(times[:-1])
    steps = np.diff(times)
    n = len(steps)
    d = family.dim
    rng_noise = substream(seed, NOISE)
    increments = np.sqrt(2.0 * steps)[:, None] * rng_noise.standard_normal((n, d))
    bridge_u = substream(seed, BRIDGE).random(n) if bridge_detection else None

    pts_a = np.empty((n + 1, d))
    pts_b = np.empty((n + 1, d))
    pts_a[0] = x0
    pts_b[0] = y0
    meet_k: int | None = 0 if float(np.linalg.norm(x0 - y0)) <= eps_meet else None
    use_scalar = d == 1 and family.scalar_grads is not None
    if use_scalar:
        grads = family.scalar_grads
        out_a = pts_a[:, 0]
        out_b = pts_b[:, 0]
        x = float(x0[0])
        y = float(y0[0])
        hl = steps.tolist()
        wl = increments[:, 0].tolist()
        il = step_index.tolist()
        ul = bridge_u.tolist() if bridge_detection else None
        for k in range(n):
            h = hl[k]
            w = wl[k]
            g = grads[il[k]]
            if meet_k is not None:
                x = x - h * g(x) + w
                y = x
            else:
                r_old = abs(x - y)
                # 1-D reflection: the mirrored increment is -w.
                x = x - h * g(x) + w
                y = y - h * g(y) - w
                r_new = abs(x - y)
                hit = r_new <= eps_meet
                if not hit and bridge_detection and math.isfinite(r_new):
                    # Crossing probability of a Brownian bridge with variance
                    # rate 8 (the difference has volatility 2*sqrt(2)).
                    if ul[k] < math.exp(-r_old * r_new / (4.0 * h)):
                        hit = True
                if hit:
                    meet_k = k + 1
                    y = x
            out_a[k + 1] = x
            out_b[k + 1] = y
    else:
        x = x0.copy()
        y = y0.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(n):
                h = steps[k]
                i = int(step_index[k])
                w = increments[k]
                if meet_k is not None:
                    x = x - h * family.grad(i, x) + w
                    y = x
                else:
                    diff = x - y
                    r_old = float(np.linalg.norm(diff))
                    e = diff / r_old
                    w_b = w - 2.0 * e * float(np.dot(e, w))
                    x = x - h * family.grad(i, x) + w
                    y = y - h * family.grad(i, y) + w_b
                    r_new = float(np.linalg.norm(x - y))
                    hit = r_new <= eps_meet
                    if not hit and bridge_detection and math.isfinite(r_new):
                        p_hit = math.exp(-r_old * r_new / (4.0 * h))
                        hit = bridge_u[k] < p_hit
                    if hit:
                        meet_k = k + 1
                        y = x.copy()
                pts_a[k + 1] = x
                pts_b[k + 1] = y
    bad = _first_bad_time(times, pts_a)
    if bad is None:
        bad = _first_bad_time(times, pts_b)
    if bad is not None:
        raise DivergenceError(f"state became non-finite at t={bad:g}", bad)
    annotation = np.append(step_index, step_index[-1] if n else 0)
    digest = config_digest(
        {
            "process": "reflection-coupling",
            "family": family.describe(),
            "eta": eta,
            "x0": x0.tolist(),
            "y0": y0.tolist(),
            "horizon": horizon,
            "dt": dt,
            "eps_meet": eps_meet,
            "bridge_detection": bridge_detection,
            "seed": seed,
        }
    )
    path_a = Trajectory(times, pts_a, annotation, seed, digest)
    path_b = Trajectory(times, pts_b, annotation, seed, digest)
    r = np.linalg.norm(pts_a - pts_b, axis=1)
    if meet_k is not None:
        r[meet_k:] = 0.0
        meeting_time = float(times[meet_k])
    else:
        meeting_time = None
    f = distance_profile(r, family.declared_L, family.declared_R)
    return CoupledTrajectory(path_a, path_b, r, f, meeting_time)


def distance_function_F(r: float, L: float, R: float) -> float:
    """Concave comparison distance used by the reflection coupling.

    ``F(r) = int_0^r exp(-L min(s,R)^2 / 2) (1 - min(s,R) / (2R)) ds``,
    evaluated by adaptive quadrature on [0, min(r, R)] (relative tolerance
    1e-10); beyond R the integrand is the constant ``exp(-L R^2 / 2) / 2``,
    so the tail is closed form.  Satisfies ``exp(-L R^2/2) r / 2 <= F(r) <= r``.
    """
    if r < 0:
        raise InvalidParameterError("r must be nonnegative")
    if L < 0 or R <= 0:
        raise InvalidParameterError("need L >= 0 and R > 0")
    if r == 0.0:
        return 0.0
    head_end = min(r, R)
    head, _ = quad(
        lambda s: math.exp(-L * s * s / 2.0) * (1.0 - s / (2.0 * R)),
        0.0,
        head_end,
        epsrel=1e-10,
        epsabs=0.0,
    )
    tail = 0.0
    if r > R:
        tail = (r - R) * math.exp(-L * R * R / 2.0) / 2.0
    return head + tail


def distance_profile(r: np.ndarray, L: float, R: float) -> np.ndarray:
    """Closed-form (erf-based) evaluation of ``distance_function_F`` on arrays."""
    r = np.asarray(r, dtype=float)
    s = np.minimum(r, R)
    if L == 0.0:
        head = s - s * s / (4.0 * R)
    else:
        head = (
            math.sqrt(math.pi / (2.0 * L)) * erf(s * math.sqrt(L / 2.0))
            + np.expm1(-L * s * s / 2.0) / (2.0 * R * L)
        )
    tail = np.maximum(r - R, 0.0) * math.exp(-L * R * R / 2.0) / 2.0
    return head + tail
