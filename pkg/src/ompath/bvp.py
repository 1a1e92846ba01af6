"""Two independent solvers for the most probable path problem.

:func:`shoot` integrates the second-order Euler-Lagrange field with RK4
and Newton-iterates on the unknown initial velocity until the terminal
endpoint lands on target.  :func:`minimize_action` never looks at the
Euler-Lagrange equation: it descends a discretization of the action
itself.  The two make different errors, so their agreement on the
two-well benchmark is a meaningful cross-check rather than a tautology.

The minimizer's objective is the segment-midpoint discretization

    sum_k h L((z_k + z_{k+1})/2, (z_{k+1} - z_k)/h),

whose stationary points track the continuum extremals uniformly in the
node index.  (Differentiating the trapezoid rule with stencil-derived
velocities instead leaves an O(1) defect in the first and last interior
gradient entries, which shows up as a visible boundary layer in the
"minimizer".  The trapezoid rule stays what it is everywhere else in
the package: the reporting quadrature.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .action import Path, action_of_path
from .euler_lagrange import (
    SecondOrderField,
    WrongReductionError,
    el_residual,
    make_second_order_field,
)
from .levy import as_eta_array
from .model import BoundaryPair

__all__ = [
    "BlowUpError",
    "ShootingConfig",
    "SolveResult",
    "el_diagnostics",
    "integrate_second_order",
    "minimize_action",
    "shoot",
    "solve_both",
]


class BlowUpError(RuntimeError):
    """The RK4 integration left the reachable range of floats."""

    def __init__(self, time: float) -> None:
        super().__init__(f"second-order integration blew up at t = {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class ShootingConfig:
    """Knobs for :func:`shoot`.

    ``v0`` overrides the default initial-velocity guess (the chord
    (z1 - z0)/T).  ``fd_step`` is the forward-difference step used for
    the Newton matrix in velocity space.
    """

    n: int = 1000
    tol: float = 1e-10
    max_iter: int = 50
    fd_step: float = 1e-6
    v0: np.ndarray | None = None
    max_backtracks: int = 20

    def __post_init__(self) -> None:
        if self.n < 10:
            raise ValueError(f"shooting grid needs n >= 10, got {self.n}")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.fd_step > 0.0:
            raise ValueError("fd_step must be positive")
        if self.v0 is not None:
            v0 = np.asarray(self.v0, dtype=float).ravel()
            v0.setflags(write=False)
            object.__setattr__(self, "v0", v0)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of either solver.

    ``boundary_mismatch_norm`` is |z(T) - z1| before endpoint pinning for
    the shooter and identically zero for the minimizer (its endpoints
    are never free).  ``el_residual_max`` and ``action`` are NaN when the
    solver had no system to evaluate them against.
    """

    path: Path
    converged: bool
    boundary_mismatch_norm: float
    el_residual_max: float
    action: float
    iterations: int
    method: str
    initial_velocity: np.ndarray | None = None
    gradient_norm: float | None = None


def integrate_second_order(field: SecondOrderField, z0, v0, T: float, n: int):
    """Classical RK4 on zdot = v, vdot = rhs(z); returns (Path, velocities).

    Raises :class:`BlowUpError` (with the failing time attached) as soon
    as a state stops being finite.
    """
    if n < 1:
        raise ValueError("need at least one step")
    if not T > 0.0:
        raise ValueError("T must be positive")
    z0 = np.asarray(z0, dtype=float).ravel()
    v0 = np.asarray(v0, dtype=float).ravel()
    if z0.shape != (field.d,) or v0.shape != (field.d,):
        raise ValueError(f"initial data must have shape ({field.d},)")
    h = T / n
    grid = np.linspace(0.0, T, n + 1)
    pos = np.empty((n + 1, field.d))
    vel = np.empty((n + 1, field.d))
    pos[0], vel[0] = z0, v0
    z, v = z0, v0
    rhs = field.rhs
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            a1 = rhs(z)
            z2 = z + 0.5 * h * v
            a2 = rhs(z2)
            v2 = v + 0.5 * h * a1
            z3 = z + 0.5 * h * v2
            a3 = rhs(z3)
            v3 = v + 0.5 * h * a2
            z4 = z + h * v3
            a4 = rhs(z4)
            v4 = v + h * a3
            z = z + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            if not (np.all(np.isfinite(z)) and np.all(np.isfinite(v))):
                raise BlowUpError(float(grid[k + 1]))
            pos[k + 1], vel[k + 1] = z, v
    vel.setflags(write=False)
    return Path(grid, pos), vel


def el_diagnostics(system, path: Path, eta) -> float:
    """Max norm of the Euler-Lagrange residual over interior nodes.

    Velocities come from the path's derived stencils and accelerations
    from the standard second central difference, so for a smooth extremal
    this decays like O(h^2).  Needs at least four segments.
    """
    if path.n < 4:
        raise ValueError("residual diagnostics need at least 4 segments")
    z = path.values
    h = path.h
    zddot = (z[2:] - 2.0 * z[1:-1] + z[:-2]) / (h * h)
    res = el_residual(system, z[1:-1], path.velocities[1:-1], zddot, eta)
    return float(np.max(np.linalg.norm(res, axis=-1)))


def _result_diagnostics(system, eta, path, fallback=float("nan")):
    if system is None:
        return fallback, fallback
    report = action_of_path(system, path, eta)
    return el_diagnostics(system, path, eta), report.action


def shoot(field: SecondOrderField, boundary: BoundaryPair,
          cfg: ShootingConfig | None = None, *, system=None, eta=None) -> SolveResult:
    """Single shooting for z(0) = z0, z(T) = z1 on the second-order field.

    Newton's method on the terminal mismatch as a function of the initial
    velocity, with a forward-difference Jacobian and step halving (at
    most ``max_backtracks`` halvings per iteration) to keep the mismatch
    norm decreasing.  A trajectory that blows up during a trial step just
    rejects that step.

    When ``system``/``eta`` are supplied the result carries the action
    and Euler-Lagrange residual of the returned path; otherwise those
    fields are NaN.  On convergence the terminal node is pinned to z1
    exactly (diagnostics are computed before pinning).
    """
    cfg = cfg or ShootingConfig()
    z0, z1, T = boundary.z0, boundary.z1, boundary.T
    if boundary.d != field.d:
        raise ValueError(f"boundary dimension {boundary.d} != field dimension {field.d}")

    def try_velocity(v):
        try:
            path, vel = integrate_second_order(field, z0, v, T, cfg.n)
        except BlowUpError:
            return None, None
        return path, path.values[-1] - z1

    v = np.asarray(cfg.v0, dtype=float).ravel() if cfg.v0 is not None else (z1 - z0) / T
    path, miss = try_velocity(v)
    if path is None:
        # not even the first guess integrates; report the chord path
        straight = Path.straight_line(z0, z1, T, max(cfg.n, 10))
        el_max, act = _result_diagnostics(system, eta, straight)
        return SolveResult(
            path=straight, converged=False,
            boundary_mismatch_norm=float("inf"),
            el_residual_max=el_max, action=act, iterations=0,
            method="shooting", initial_velocity=v,
        )
    miss_norm = float(np.linalg.norm(miss))
    iterations = 0
    while miss_norm > cfg.tol and iterations < cfg.max_iter:
        jac = np.empty((field.d, field.d))
        singular = False
        for j in range(field.d):
            bump = v.copy()
            bump[j] += cfg.fd_step
            _, miss_j = try_velocity(bump)
            if miss_j is None:
                singular = True
                break
            jac[:, j] = (miss_j - miss) / cfg.fd_step
        if singular:
            break
        try:
            step = np.linalg.solve(jac, -miss)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        accepted = False
        for _ in range(cfg.max_backtracks + 1):
            cand_v = v + scale * step
            cand_path, cand_miss = try_velocity(cand_v)
            if cand_path is not None and float(np.linalg.norm(cand_miss)) < miss_norm:
                v, path, miss = cand_v, cand_path, cand_miss
                miss_norm = float(np.linalg.norm(miss))
                accepted = True
                break
            scale *= 0.5
        iterations += 1
        if not accepted:
            break

    converged = miss_norm <= cfg.tol
    el_max, act = _result_diagnostics(system, eta, path)
    if converged:
        pinned = path.values.copy()
        pinned[-1] = z1
        path = Path(path.grid, pinned)
    return SolveResult(
        path=path, converged=converged,
        boundary_mismatch_norm=miss_norm,
        el_residual_max=el_max, action=act, iterations=iterations,
        method="shooting", initial_velocity=v,
    )


def _midpoint_data(system, eta_arr, z, h):
    mid = 0.5 * (z[1:] + z[:-1])
    vel = (z[1:] - z[:-1]) / h
    f = system.drift.eval(mid)
    w = f - vel - eta_arr
    return mid, w


def _midpoint_objective(system, eta_arr, z, h) -> float:
    mid, w = _midpoint_data(system, eta_arr, z, h)
    r = w @ system.noise.B_inv.T
    trace = np.trace(system.drift.jacobian(mid), axis1=-2, axis2=-1)
    return float(h * np.sum(0.5 * np.sum(r * r, axis=-1) + 0.5 * trace))


def _midpoint_objective_grad(system, eta_arr, z, h):
    # gradient with respect to the interior nodes only
    mid, w = _midpoint_data(system, eta_arr, z, h)
    b_inv = system.noise.B_inv
    a = b_inv.T @ b_inv
    r = w @ b_inv.T
    jac = system.drift.jacobian(mid)
    s = system.drift.second_derivs(mid)
    objective = float(h * np.sum(
        0.5 * np.sum(r * r, axis=-1)
        + 0.5 * np.trace(jac, axis1=-2, axis2=-1)))
    aw = w @ a
    q = np.einsum("kji,kj->ki", jac, aw) + 0.5 * s  # dL/dz at midpoints
    p = -aw                                         # dL/dv at midpoints
    grad = np.zeros_like(z)
    grad[:-1] += 0.5 * h * q - p
    grad[1:] += 0.5 * h * q + p
    return objective, grad[1:-1]


def minimize_action(system, boundary: BoundaryPair, eta, n: int = 400,
                    init: Path | None = None, gtol: float = 1e-8,
                    max_iter: int = 200000) -> SolveResult:
    """Direct minimization of the midpoint-discretized action.

    Descends with Barzilai-Borwein steps and nonmonotone backtracking
    (each trial must beat the worst of the last ten accepted values; at
    most forty halvings per iteration).  Interior nodes move, endpoints
    stay pinned.  ``converged`` means the Euclidean norm of the interior
    gradient dropped to ``gtol``; stagnating above that reports False.

    The returned action is the trapezoid value of the final path, the
    same functional :func:`action_of_path` reports for any other path.
    """
    if n < 8:
        raise ValueError(f"minimization grid needs n >= 8, got {n}")
    eta_arr = as_eta_array(eta, system.d)
    z0, z1, T = boundary.z0, boundary.z1, boundary.T
    if boundary.d != system.d:
        raise ValueError(f"boundary dimension {boundary.d} != system dimension {system.d}")
    h = T / n
    if init is not None:
        if init.n != n or init.d != system.d:
            raise ValueError(
                f"initial path must have n = {n} segments in dimension {system.d}, "
                f"got n = {init.n}, d = {init.d}"
            )
        if (np.linalg.norm(init.values[0] - z0) > 1e-9
                or np.linalg.norm(init.values[-1] - z1) > 1e-9):
            raise ValueError("initial path endpoints do not match the boundary data")
        z = init.values.copy()
        z[0], z[-1] = z0, z1
    else:
        z = Path.straight_line(z0, z1, T, n).values.copy()
    grid = np.linspace(0.0, T, n + 1)

    value, grad = _midpoint_objective_grad(system, eta_arr, z, h)
    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        path = Path(grid, z)
        el_max, act = _result_diagnostics(system, eta_arr, path)
        return SolveResult(path=path, converged=False, boundary_mismatch_norm=0.0,
                           el_residual_max=el_max, action=act, iterations=0,
                           method="minimize", gradient_norm=float("inf"))

    grad_norm = float(np.linalg.norm(grad))
    history = [value]
    best_value, best_z, best_grad_norm = value, z.copy(), grad_norm
    prev_interior = None
    prev_grad = None
    step = 1e-2 / (1.0 + grad_norm)
    iterations = 0
    converged = False
    while iterations < max_iter:
        if grad_norm <= gtol:
            converged = True
            break
        interior = z[1:-1]
        if prev_interior is not None:
            ds = interior - prev_interior
            dy = grad - prev_grad
            denom = float(np.sum(ds * dy))
            if denom > 0.0:
                step = float(np.sum(ds * ds)) / denom
            step = min(max(step, 1e-14), 1e3)
        ref = max(history)
        accepted = False
        trial = step
        for _ in range(41):
            cand = z.copy()
            cand[1:-1] = interior - trial * grad
            cand_value = _midpoint_objective(system, eta_arr, cand, h)
            if np.isfinite(cand_value) and cand_value <= ref:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        prev_interior, prev_grad = interior.copy(), grad
        z = cand
        value, grad = _midpoint_objective_grad(system, eta_arr, z, h)
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            break
        grad_norm = float(np.linalg.norm(grad))
        history.append(value)
        if len(history) > 10:
            history.pop(0)
        if value < best_value:
            best_value, best_z, best_grad_norm = value, z.copy(), grad_norm
        iterations += 1
    if converged:
        best_z, best_grad_norm = z, grad_norm

    path = Path(grid, best_z)
    el_max = el_diagnostics(system, path, eta_arr)
    act = action_of_path(system, path, eta_arr).action
    return SolveResult(
        path=path, converged=converged, boundary_mismatch_norm=0.0,
        el_residual_max=el_max, action=act, iterations=iterations,
        method="minimize", gradient_norm=best_grad_norm,
    )


def solve_both(system, boundary: BoundaryPair, eta, shooting: ShootingConfig | None = None,
               min_nodes: int = 400, min_init: Path | None = None,
               gtol: float = 1e-8):
    """Run both solvers and cross-wire their fallbacks.

    Returns (shooting result or None, minimization result).  The
    shooting result is None when the system admits no second-order
    reduction (non-diagonal noise).  If shooting fails to converge and
    the minimizer succeeds, shooting is retried once from the minimizer's
    initial velocity.
    """
    minimized = minimize_action(system, boundary, eta, n=min_nodes,
                                init=min_init, gtol=gtol)
    try:
        field = make_second_order_field(system, eta)
    except WrongReductionError:
        return None, minimized
    shot = shoot(field, boundary, shooting, system=system, eta=eta)
    if not shot.converged and minimized.converged:
        v0 = minimized.path.velocities[0]
        cfg = shooting or ShootingConfig()
        retry_cfg = ShootingConfig(n=cfg.n, tol=cfg.tol, max_iter=cfg.max_iter,
                                   fd_step=cfg.fd_step, v0=v0,
                                   max_backtracks=cfg.max_backtracks)
        retry = shoot(field, boundary, retry_cfg, system=system, eta=eta)
        if retry.converged or retry.boundary_mismatch_norm < shot.boundary_mismatch_norm:
            shot = retry
    return shot, minimized
