"""Alpha-stable jump components for additive Levy noise.

Each coordinate of the driving process carries an independent scalar
alpha-stable component S_alpha(sigma, beta, mu).  For alpha < 1 the
sample paths have bounded variation and the small-jump mean

    eta_j = integral over 0 < |xi| < 1 of xi nu_j(dxi)
          = (c_plus - c_minus) / (1 - alpha)

is finite; that vector is the only trace the jumps leave in the action
functional.  The Levy density is

    nu(dxi) = c_plus xi^(-1-alpha) 1_{xi>0} dxi
            + c_minus |xi|^(-1-alpha) 1_{xi<0} dxi

with coefficients tied to the (sigma, beta) parameterization by

    c_pm = sigma^alpha * alpha (1 - alpha)
           / (Gamma(2 - alpha) cos(pi alpha / 2)) * (1 pm beta) / 2.

The test suite verifies this convention against a numerically
integrated Levy-Khintchine exponent, so the scale of eta is not a
matter of bookkeeping taste: increments sampled here and the drift
correction used by the solvers agree about what "sigma" means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad

__all__ = [
    "BoundedVariationError",
    "EtaVector",
    "StableComponent",
    "check_bounded_variation",
    "eta",
    "null_component",
    "sample_stable",
    "stable_component",
    "stable_coeffs",
]


class BoundedVariationError(ValueError):
    """Raised where the machinery needs alpha < 1 and does not have it."""


@dataclass(frozen=True)
class StableComponent:
    """One scalar alpha-stable component S_alpha(sigma, beta, mu).

    ``null`` marks a coordinate that carries no jump noise at all; the
    remaining fields of a null component are not meaningful.  The
    density coefficients (c_plus, c_minus) are stored alongside the
    stable parameters; they are NaN when alpha >= 1, where the
    small-jump integral diverges.
    """

    alpha: float
    sigma: float
    beta: float
    mu: float = 0.0
    c_plus: float = float("nan")
    c_minus: float = float("nan")
    null: bool = False

    def __post_init__(self) -> None:
        if self.null:
            return
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (-1.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")
        total = self.c_plus + self.c_minus
        if math.isfinite(total) and total > 0.0:
            implied = (self.c_plus - self.c_minus) / total
            if abs(implied - self.beta) > 1e-10:
                raise ValueError(
                    "density coefficients disagree with beta: "
                    f"(c+ - c-)/(c+ + c-) = {implied!r} vs beta = {self.beta!r}"
                )


def null_component() -> StableComponent:
    """A coordinate with no jump part."""
    return StableComponent(
        alpha=float("nan"), sigma=float("nan"), beta=0.0, mu=0.0,
        c_plus=0.0, c_minus=0.0, null=True,
    )


def stable_coeffs(alpha: float, sigma: float, beta: float) -> tuple[float, float]:
    """Levy density coefficients (c_plus, c_minus) for S_alpha(sigma, beta, .).

    Requires 0 < alpha < 1: beyond that the coefficients still exist but
    the small-jump mean does not, and every consumer in this package
    needs that mean, so the gate lives here.
    """
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha >= 1.0:
        raise BoundedVariationError(
            f"alpha = {alpha}: bounded variation (and a finite small-jump "
            "mean) requires alpha < 1"
        )
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not (-1.0 <= beta <= 1.0):
        raise ValueError(f"beta must lie in [-1, 1], got {beta}")
    common = (
        sigma ** alpha
        * alpha
        * (1.0 - alpha)
        / (math.gamma(2.0 - alpha) * math.cos(math.pi * alpha / 2.0))
    )
    return common * (1.0 + beta) / 2.0, common * (1.0 - beta) / 2.0


def stable_component(alpha: float, sigma: float, beta: float, mu: float = 0.0) -> StableComponent:
    """Build a component, filling in density coefficients when alpha < 1."""
    if 0.0 < alpha < 1.0:
        c_plus, c_minus = stable_coeffs(alpha, sigma, beta)
    else:
        c_plus = c_minus = float("nan")
    return StableComponent(alpha=float(alpha), sigma=float(sigma), beta=float(beta),
                           mu=float(mu), c_plus=c_plus, c_minus=c_minus)


def check_bounded_variation(component: StableComponent) -> bool:
    """True when the component's sample paths have bounded variation."""
    return bool(component.null or component.alpha < 1.0)


@dataclass(frozen=True)
class EtaVector:
    """Small-jump drift correction, with its own cross-check attached.

    ``eta`` is the vector the solvers consume (it aliases ``analytic``).
    ``quadrature`` re-derives each entry by adaptive integration of
    xi * nu(dxi) over 0 < |xi| < 1, and ``quad_error`` carries the
    integrator's absolute error estimates.
    """

    eta: np.ndarray
    analytic: np.ndarray
    quadrature: np.ndarray
    quad_error: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.eta, self.analytic, self.quadrature, self.quad_error):
            arr.setflags(write=False)


def _small_jump_quadrature(component: StableComponent) -> tuple[float, float]:
    # integral of xi * nu(dxi) over (0, 1) minus the mirror integral over
    # (-1, 0).  The integrand c xi^(-alpha) is singular at the origin for
    # alpha in (0, 1); substituting xi = u^(1/(1-alpha)) flattens it.
    power = 1.0 / (1.0 - component.alpha)
    exponent = power * (1.0 - component.alpha) - 1.0  # zero up to rounding

    def one_side(coef: float) -> tuple[float, float]:
        if coef == 0.0:
            return 0.0, 0.0
        value, err = quad(
            lambda u: coef * power * u ** exponent, 0.0, 1.0,
            epsabs=1e-12, epsrel=1e-12,
        )
        return value, err

    plus_val, plus_err = one_side(component.c_plus)
    minus_val, minus_err = one_side(component.c_minus)
    return plus_val - minus_val, plus_err + minus_err


def eta(components: Sequence[StableComponent]) -> EtaVector:
    """Small-jump mean vector for a list of per-coordinate components.

    Null coordinates contribute zero.  Every non-null component must
    satisfy alpha < 1; the analytic value (c+ - c-)/(1 - alpha) is
    checked against quadrature before anything is returned.
    """
    components = list(components)
    d = len(components)
    analytic = np.zeros(d)
    quadrature = np.zeros(d)
    quad_error = np.zeros(d)
    for j, comp in enumerate(components):
        if comp.null:
            continue
        if not check_bounded_variation(comp):
            raise BoundedVariationError(
                f"component {j}: alpha = {comp.alpha} has no finite small-jump mean"
            )
        analytic[j] = (comp.c_plus - comp.c_minus) / (1.0 - comp.alpha)
        quadrature[j], quad_error[j] = _small_jump_quadrature(comp)
        tol = max(1e-8, quad_error[j])
        if abs(analytic[j] - quadrature[j]) > tol:
            raise RuntimeError(
                f"component {j}: analytic eta {analytic[j]!r} and quadrature "
                f"{quadrature[j]!r} disagree beyond {tol!r}"
            )
    return EtaVector(eta=analytic, analytic=analytic.copy(),
                     quadrature=quadrature, quad_error=quad_error)


def as_eta_array(value, d: int) -> np.ndarray:
    """Normalize eta into a (d,) float vector.

    Accepts an EtaVector, an array-like of length d, a scalar (broadcast
    to every coordinate), or None (no jump correction, all zeros).
    """
    if value is None:
        return np.zeros(d)
    if isinstance(value, EtaVector):
        arr = np.asarray(value.eta, dtype=float)
    else:
        arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(d, float(arr))
    if arr.shape != (d,):
        raise ValueError(f"eta must have shape ({d},), got {arr.shape}")
    return arr


def _standard_stable(alpha: float, beta: float, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Chambers-Mallows-Stuck transform, alpha != 1 branch.  u is uniform on
    # (-pi/2, pi/2), w standard exponential.
    tilt = beta * math.tan(math.pi * alpha / 2.0)
    b0 = math.atan(tilt) / alpha
    s0 = (1.0 + tilt * tilt) ** (1.0 / (2.0 * alpha))
    return (
        s0
        * np.sin(alpha * (u + b0))
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos(u - alpha * (u + b0)) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_stable(component: StableComponent, dt: float, rng: np.random.Generator,
                  size: int | None = None):
    """Increments of the component's Levy process over a step of length dt.

    Self-similarity gives increment = sigma dt^(1/alpha) X + mu dt with X
    standard S_alpha(1, beta, 0), and X comes from the Chambers-Mallows-
    Stuck transform of one uniform and one exponential variate.  The two
    draws happen in that order (all uniforms, then all exponentials), which
    is part of the reproducibility contract for ensembles.

    Returns a scalar for ``size=None``, else an array of that shape.
    """
    if component.null:
        raise ValueError("cannot sample a null component")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if component.alpha == 1.0:
        raise ValueError("alpha = 1 is not supported by the sampler branch in use")
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    w = rng.standard_exponential(size)
    x = _standard_stable(component.alpha, component.beta, u, w)
    out = component.sigma * dt ** (1.0 / component.alpha) * x + component.mu * dt
    if size is None:
        return float(out)
    return out
