"""Uniformly gridded paths, the action functional, and the symmetry gate.

The Lagrangian in use is

    L(z, zdot) = 1/2 |B^-1 (f(z) - zdot - eta)|^2 + 1/2 tr grad f(z),

a positive-definite quadratic in the velocity plus a divergence term.
Minimizers of its time integral over paths with pinned endpoints are the
most probable transition paths; the integral itself is what
:func:`action_of_path` reports.  The divergence correction only turns a
minimization into a well-posed variational problem when the matrix
(B^-1)^T B^-1 grad f is symmetric, which is what
:func:`check_poincare_symmetry` probes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .levy import as_eta_array

__all__ = [
    "ActionReport",
    "Path",
    "SymmetryReport",
    "action_of_path",
    "check_poincare_symmetry",
    "lagrangian",
]


class Path:
    """A path sampled on a uniform time grid.

    ``values`` has shape (n+1, d) over the n+1 grid nodes.  The grid must
    be strictly increasing and uniform to within 1e-14 (relative to the
    time span); at least two segments are required so that derived
    velocities make sense.

    ``velocities`` differentiates the nodes: second-order one-sided
    stencils at the two ends, central differences inside.
    """

    __slots__ = ("grid", "values", "_velocities")

    def __init__(self, grid, values) -> None:
        grid = np.asarray(grid, dtype=float).ravel()
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError(f"values must be (n+1, d), got shape {values.shape}")
        if grid.shape[0] != values.shape[0]:
            raise ValueError(
                f"grid has {grid.shape[0]} nodes but values has {values.shape[0]} rows"
            )
        if grid.shape[0] < 3:
            raise ValueError("need at least two segments (three nodes)")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise ValueError("grid and values must be finite")
        steps = np.diff(grid)
        if np.any(steps <= 0.0):
            raise ValueError("grid must be strictly increasing")
        span = grid[-1] - grid[0]
        h = span / (grid.shape[0] - 1)
        if np.max(np.abs(steps - h)) > 1e-14 * max(1.0, abs(span)):
            raise ValueError("grid must be uniform to within 1e-14")
        self.grid = grid
        self.values = values
        self.grid.setflags(write=False)
        self.values.setflags(write=False)
        self._velocities = None

    @property
    def n(self) -> int:
        """Number of segments."""
        return self.grid.shape[0] - 1

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return float((self.grid[-1] - self.grid[0]) / self.n)

    @property
    def T(self) -> float:
        return float(self.grid[-1] - self.grid[0])

    @property
    def velocities(self) -> np.ndarray:
        if self._velocities is None:
            z = self.values
            h = self.h
            v = np.empty_like(z)
            v[1:-1] = (z[2:] - z[:-2]) / (2.0 * h)
            v[0] = (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * h)
            v[-1] = (3.0 * z[-1] - 4.0 * z[-2] + z[-3]) / (2.0 * h)
            v.setflags(write=False)
            self._velocities = v
        return self._velocities

    @classmethod
    def straight_line(cls, z0, z1, T: float = 1.0, n: int = 100) -> "Path":
        z0 = np.asarray(z0, dtype=float).ravel()
        z1 = np.asarray(z1, dtype=float).ravel()
        grid = np.linspace(0.0, T, n + 1)
        values = z0[None, :] + np.outer(grid / T, z1 - z0)
        values[0] = z0
        values[-1] = z1
        return cls(grid, values)

    def __repr__(self) -> str:
        return f"Path(n={self.n}, d={self.d}, T={self.T:.6g})"


def _lagrangian_parts(system, z, zdot, eta_arr):
    # quadratic part and half-divergence part, batched over leading axes
    b_inv = system.noise.B_inv
    f = system.drift.eval(z)
    residual = (f - zdot - eta_arr) @ b_inv.T
    quadratic = 0.5 * np.sum(residual * residual, axis=-1)
    trace = np.trace(system.drift.jacobian(z), axis1=-2, axis2=-1)
    return quadratic, 0.5 * trace


def lagrangian(system, z, zdot, eta) -> float | np.ndarray:
    """Pointwise Lagrangian value; broadcasts over leading axes of z, zdot."""
    eta_arr = as_eta_array(eta, system.d)
    z = np.asarray(z, dtype=float)
    zdot = np.asarray(zdot, dtype=float)
    quadratic, half_div = _lagrangian_parts(system, z, zdot, eta_arr)
    total = quadratic + half_div
    if total.ndim == 0:
        return float(total)
    return total


@dataclass(frozen=True)
class ActionReport:
    """Trapezoid action of a path plus its per-node integrand."""

    action: float
    node_lagrangians: np.ndarray
    node_quadratic: np.ndarray
    node_divergence: np.ndarray
    rule: str
    n: int

    def __post_init__(self) -> None:
        for arr in (self.node_lagrangians, self.node_quadratic, self.node_divergence):
            arr.setflags(write=False)


def action_of_path(system, path: Path, eta) -> ActionReport:
    """Trapezoid-rule action of a path, with derived node velocities.

    Second-order accurate for smooth paths: refining n doubles should
    shrink the error by about 4x.
    """
    eta_arr = as_eta_array(eta, system.d)
    if path.d != system.d:
        raise ValueError(f"path dimension {path.d} != system dimension {system.d}")
    quadratic, half_div = _lagrangian_parts(system, path.values, path.velocities, eta_arr)
    node_l = quadratic + half_div
    value = float(np.trapezoid(node_l, path.grid))
    return ActionReport(
        action=value,
        node_lagrangians=node_l,
        node_quadratic=quadratic,
        node_divergence=half_div,
        rule="trapezoid",
        n=path.n,
    )


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    worst_asymmetry: float
    worst_point: np.ndarray
    tol: float | None

    def __post_init__(self) -> None:
        self.worst_point.setflags(write=False)


def check_poincare_symmetry(system, probes, tol: float | None = None) -> SymmetryReport:
    """Probe whether (B^-1)^T B^-1 grad f(z) is symmetric.

    That symmetry is exactly the closedness condition under which the
    velocity-linear part of the Lagrangian is a total derivative and the
    boundary value problem for minimizers has the usual second-order
    form.  With ``tol=None`` each probe is judged against the scaled
    default 1e-8 * (1 + max |M|); passing an explicit ``tol`` makes the
    comparison absolute.

    The report is invariant under reordering of the probe set (the worst
    offender is the worst offender in any order).
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if probes.shape[0] == 0 or probes.shape[1] != system.d:
        raise ValueError(f"probes must be (k, {system.d}) with k >= 1, got {probes.shape}")
    b_inv = system.noise.B_inv
    a = b_inv.T @ b_inv
    jac = system.drift.jacobian(probes)
    m = np.einsum("ij,kjl->kil", a, jac)
    asym = np.max(np.abs(m - np.swapaxes(m, -1, -2)), axis=(-2, -1))
    if tol is None:
        scale = np.max(np.abs(m), axis=(-2, -1))
        passed = bool(np.all(asym <= 1e-8 * (1.0 + scale)))
    else:
        passed = bool(np.all(asym <= tol))
    worst = int(np.argmax(asym))
    return SymmetryReport(
        passed=passed,
        worst_asymmetry=float(asym[worst]),
        worst_point=probes[worst].copy(),
        tol=tol,
    )
