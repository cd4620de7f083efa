"""Closed-form constants and convergence bounds for the switched diffusion.

Every constant is computed from the declared family regularity data
(L, K, R, dimension), the initial point, and the gradient norms at zero:

* ``c``   = min(3L + 2/R^2, K) exp(-L R^2 / 2)   -- contraction rate
* ``C``   = 2 exp(L R^2 / 2)                     -- contraction prefactor
* ``c_phi`` = c / (32 (L+1) + 4 c)               -- learning-rate exponent (< 1/4)
* ``C1_phi`` = 1 + L + sup_i |grad_i(0)|
* ``C_phi_theta0_d`` = 8 sqrt(1 + d + |theta0|^2 + 2 |mean grad(0)|^2) * C1_phi
* ``C_phi_lemma4`` = 2 (L+K) R^2 + sup_i |grad_i(0)|^2 / K
* ``C1_d`` = sqrt(C_phi_lemma4 d / K)            -- first-moment bound of the
  stationary law
* ``tilde_c(t)`` = (|theta0|^2 + 2 t |mean grad(0)|^2 + 2 t d) exp(2 (L+1) t)
  -- second-moment bound of the mean-field diffusion
* ``c_lemma2(t)`` = 2 exp(2 (L+1) t) tilde_c(t)  -- time-continuity constant

The three bound functions:

* strong error:     E|theta_t - zeta_t| <= C_phi_theta0_d exp(8 (1+L) t) eta^(1/4),
  improvable to C_phi_theta0_d min(exp(8 (1+L) t) eta^(1/4), R + eta^(1/4))
* ergodicity:       W1(law_t, stationary) <= C exp(-c t) W1(law_0, stationary)
* stationary bias:  W1(mu_eta, mu) <= (C_phi_{theta0=0,d} + C1_d C) eta^c_phi
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidParameterError
from ..potentials import PotentialFamily, mean_gradient


@dataclass(frozen=True)
class TheoremConstants:
    L: float
    K: float
    R: float
    d: int
    theta0_norm: float
    mean_grad0_norm: float
    sup_grad0_norm: float
    c: float
    C: float
    c_phi: float
    C1_phi: float
    C_phi_theta0_d: float
    C_phi_lemma4: float
    C1_d: float

    def tilde_c(self, t: float) -> float:
        """Second-moment bound of the mean-field diffusion at time t."""
        return (
            self.theta0_norm**2 + 2.0 * t * self.mean_grad0_norm**2 + 2.0 * t * self.d
        ) * math.exp(2.0 * (self.L + 1.0) * t)

    def c_lemma2(self, t: float) -> float:
        """Time-continuity constant: E|x_t - x_s|^2 <= c_lemma2(t) |t - s|."""
        return 2.0 * math.exp(2.0 * (self.L + 1.0) * t) * self.tilde_c(t)

    @property
    def C_phi_d(self) -> float:
        """Stationary-bias prefactor (initial point at the origin)."""
        c1_phi_origin = 8.0 * math.sqrt(
            1.0 + self.d + 2.0 * self.mean_grad0_norm**2
        ) * self.C1_phi
        return c1_phi_origin + self.C1_d * self.C

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TheoremConstants":
        return cls(**data)


def compute_constants(family: PotentialFamily, theta0=None) -> TheoremConstants:
    """All closed-form constants for a family and an initial point."""
    L = float(family.declared_L)
    K = float(family.declared_K)
    R = float(family.declared_R)
    d = int(family.dim)
    if theta0 is None:
        theta0 = np.zeros(d)
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    if theta0.shape != (d,):
        raise InvalidParameterError(f"theta0 has shape {theta0.shape}, expected ({d},)")
    theta0_norm = float(np.linalg.norm(theta0))
    mg0 = float(np.linalg.norm(mean_gradient(family, np.zeros(d))))
    sup_g0 = float(max(family.grad_norms_at_zero))

    c = min(3.0 * L + 2.0 / R**2, K) * math.exp(-L * R**2 / 2.0)
    C = 2.0 * math.exp(L * R**2 / 2.0)
    c_phi = c / (32.0 * (L + 1.0) + 4.0 * c)
    c1_phi = 1.0 + L + sup_g0
    c_phi_theta0_d = 8.0 * math.sqrt(1.0 + d + theta0_norm**2 + 2.0 * mg0**2) * c1_phi
    c_phi_lemma4 = 2.0 * (L + K) * R**2 + sup_g0**2 / K
    c1_d = math.sqrt(c_phi_lemma4 * d / K)
    return TheoremConstants(
        L=L,
        K=K,
        R=R,
        d=d,
        theta0_norm=theta0_norm,
        mean_grad0_norm=mg0,
        sup_grad0_norm=sup_g0,
        c=c,
        C=C,
        c_phi=c_phi,
        C1_phi=c1_phi,
        C_phi_theta0_d=c_phi_theta0_d,
        C_phi_lemma4=c_phi_lemma4,
        C1_d=c1_d,
    )


@dataclass(frozen=True)
class StrongErrorBound:
    plain: float
    improved: float

    @property
    def operative(self) -> float:
        return min(self.plain, self.improved)


def theorem1_bound(consts: TheoremConstants, eta: float, t: float) -> StrongErrorBound:
    """Strong-error bound at time t for learning rate eta (plain and improved)."""
    if eta <= 0 or t <= 0:
        raise InvalidParameterError("eta and t must be positive")
    quarter = eta**0.25
    growth = math.exp(8.0 * (1.0 + consts.L) * t)
    plain = consts.C_phi_theta0_d * growth * quarter
    improved = consts.C_phi_theta0_d * min(growth * quarter, consts.R + quarter)
    return StrongErrorBound(plain=plain, improved=improved)


def theorem2_bound(consts: TheoremConstants, t: float, w0: float) -> float:
    """Exponential-ergodicity bound: C exp(-c t) times the initial distance."""
    if t < 0:
        raise InvalidParameterError("t must be nonnegative")
    if w0 < 0:
        raise InvalidParameterError("w0 must be nonnegative")
    return consts.C * math.exp(-consts.c * t) * w0


def theorem3_bound(consts: TheoremConstants, eta: float) -> float:
    """Stationary subsampling-bias bound: C_phi_d eta^c_phi."""
    if eta <= 0:
        raise InvalidParameterError("eta must be positive")
    return consts.C_phi_d * eta**consts.c_phi


def combined_bound(consts: TheoremConstants, eta: float, t: float, w0: float) -> float:
    """Triangle-inequality bound on W1(law_t, target): bias plus decay terms."""
    return theorem3_bound(consts, eta) + theorem2_bound(consts, t, w0)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float


def fit_power_law(etas, values) -> PowerLawFit:
    """Least-squares fit of ``values ~ prefactor * etas^exponent`` in log-log."""
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(etas) != len(values) or len(etas) < 3:
        raise InvalidParameterError("need at least 3 (eta, value) pairs")
    if np.any(etas <= 0) or np.any(values <= 0):
        raise InvalidParameterError("etas and values must be positive")
    lx = np.log(etas)
    ly = np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(float(slope), float(math.exp(intercept)), r2)
