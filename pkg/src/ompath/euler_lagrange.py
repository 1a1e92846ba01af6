"""Euler-Lagrange machinery for the action functional.

Three routes to the same stationarity condition live here:

* :func:`el_residual` assembles the full first-variation density
  dL/dz - d/dt dL/dzdot for arbitrary invertible noise; it vanishes
  along extremals and its sign convention matches the gradient of the
  discretized action (descent decreases the action).
* :func:`newton_rhs` specializes to diagonal noise, where the
  Euler-Lagrange equation rearranges into the explicit second-order form
  zddot_i = g_i(z) of a Newton system in the effective potential.
* :func:`maier_stein_rhs` is the same g written out by hand for the
  gamma = 1 two-well drift, kept as an independent check on the generic
  assembly.

:func:`make_second_order_field` picks the closed form when it applies
and the generic assembly otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .levy import as_eta_array

__all__ = [
    "SecondOrderField",
    "SymmetryWarning",
    "WrongReductionError",
    "el_residual",
    "maier_stein_rhs",
    "make_second_order_field",
    "newton_rhs",
]


class WrongReductionError(ValueError):
    """The diagonal-noise reduction was asked for with non-diagonal noise."""


class SymmetryWarning(UserWarning):
    """The symmetry the variational structure relies on looks violated."""


_ASYM_SCALE = 1e-8


def _warn_if_asymmetric(m: np.ndarray, where: str) -> None:
    asym = float(np.max(np.abs(m - np.swapaxes(m, -1, -2))))
    scale = 1.0 + float(np.max(np.abs(m)))
    if asym > _ASYM_SCALE * scale:
        warnings.warn(
            f"{where}: (B^-1)^T B^-1 grad f is asymmetric "
            f"(worst entry mismatch {asym:.3e}); the second-order reduction "
            "and the variational interpretation are unreliable here",
            SymmetryWarning,
            stacklevel=3,
        )


def el_residual(system, z, zdot, zddot, eta) -> np.ndarray:
    """First-variation density of the action at (z, zdot, zddot).

    With A = (B^-1)^T B^-1, w = f(z) - zdot - eta, J = grad f(z) and s
    the gradient of div f,

        residual = J^T A w + s/2 + A (J zdot - zddot).

    This is dL/dz - d/dt dL/dzdot, so it vanishes exactly along
    extremals, and for the free particle (f = 0, B = I, eta = 0) it
    reduces to -zddot.  Broadcasts over leading axes of z, zdot, zddot.
    """
    d = system.d
    eta_arr = as_eta_array(eta, d)
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    zddot = np.asarray(zddot, dtype=float)
    b_inv = system.noise.B_inv
    a = b_inv.T @ b_inv
    f = system.drift.eval(z)
    jac = system.drift.jacobian(z)
    s = system.drift.second_derivs(z)
    m = np.einsum("ij,...jl->...il", a, jac)
    _warn_if_asymmetric(m, "el_residual")
    w = f - zdot - eta_arr
    return (
        np.einsum("...ji,...j->...i", m, w)
        + 0.5 * s
        + np.einsum("...ij,...j->...i", m, zdot)
        - zddot @ a
    )


def newton_rhs(system, z, eta) -> np.ndarray:
    """Acceleration g(z) of the second-order form zddot = g(z).

    Only valid for diagonal noise B = diag(b),

        g_i(z) = sum_j (b_i^2 / b_j^2) (f^j(z) - eta_j) J_ji(z)
               + (b_i^2 / 2) s_i(z).

    The velocity drops out because, under the symmetry of A grad f, the
    velocity-coupled terms of the Euler-Lagrange equation cancel in
    pairs.  Raises :class:`WrongReductionError` for non-diagonal noise.
    """
    if not system.noise.is_diagonal():
        raise WrongReductionError(
            "the second-order reduction requires diagonal noise; "
            "use el_residual for general invertible B"
        )
    b_sq = np.diagonal(system.noise.B) ** 2
    system.noise.B_inv  # raises SingularNoiseError for a zero diagonal entry
    eta_arr = as_eta_array(eta, system.d)
    z = np.asarray(z, dtype=float)
    f = system.drift.eval(z)
    jac = system.drift.jacobian(z)
    s = system.drift.second_derivs(z)
    _warn_if_asymmetric(jac / b_sq[:, None], "newton_rhs")
    weighted = (f - eta_arr) / b_sq
    return b_sq * np.einsum("...ji,...j->...i", jac, weighted) + 0.5 * b_sq * s


def maier_stein_rhs(z, eta) -> np.ndarray:
    """Closed-form acceleration for the gamma = 1 two-well system, B = I.

    Expanded by hand from the Newton form; the test suite holds it equal
    to the generic assembly to near machine precision.
    """
    z = np.asarray(z, dtype=float)
    eta_arr = np.asarray(eta, dtype=float)
    x, y = z[..., 0], z[..., 1]
    e1, e2 = eta_arr[..., 0], eta_arr[..., 1]
    g1 = (
        3.0 * x ** 5
        + 6.0 * x ** 3 * y * y
        - 4.0 * x ** 3
        + 3.0 * e1 * x * x
        + x * y ** 4
        + 2.0 * e2 * x * y
        - 3.0 * x
        + e1 * y * y
        - e1
    )
    g2 = (
        3.0 * x ** 4 * y
        + 2.0 * x * x * y ** 3
        + e2 * x * x
        + 2.0 * e1 * x * y
        + e2
    )
    return np.stack([g1, g2], axis=-1)


@dataclass(frozen=True)
class SecondOrderField:
    """Acceleration field zddot = rhs(z) with a provenance tag.

    ``provenance`` is "maier-stein-closed-form" when the hand-expanded
    two-well right-hand side is in use and "generic-assembly" otherwise.
    """

    d: int
    rhs: Callable[[np.ndarray], np.ndarray]
    provenance: str


def make_second_order_field(system, eta) -> SecondOrderField:
    """Second-order field for the system, dispatching on structure.

    The gamma = 1 two-well system with identity noise gets the closed
    form; any other diagonal-noise system gets the generic assembly.
    Non-diagonal noise raises :class:`WrongReductionError`.
    """
    eta_arr = as_eta_array(eta, system.d)
    meta = system.drift.meta or {}
    if (
        meta.get("kind") == "maier_stein"
        and meta.get("gamma") == 1.0
        and "mu_folded" not in meta
        and np.array_equal(system.noise.B, np.eye(2))
    ):
        return SecondOrderField(
            d=2,
            rhs=lambda z, _e=eta_arr: maier_stein_rhs(z, _e),
            provenance="maier-stein-closed-form",
        )
    if not system.noise.is_diagonal():
        raise WrongReductionError(
            "no second-order reduction for non-diagonal noise"
        )
    return SecondOrderField(
        d=system.d,
        rhs=lambda z, _s=system, _e=eta_arr: newton_rhs(_s, z, _e),
        provenance="generic-assembly",
    )
