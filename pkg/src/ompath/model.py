"""Problem data: drift fields, noise matrices, and assembled systems.

A :class:`SystemSpec` couples a drift field carrying its own derivatives,
a square noise matrix, and one alpha-stable jump component per
coordinate.  The two-well planar benchmark system is built in, along
with a small polynomial-drift factory that backs the CLI's config
format.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .levy import (
    BoundedVariationError,
    StableComponent,
    check_bounded_variation,
    null_component,
)

__all__ = [
    "BoundaryPair",
    "DriftField",
    "NoiseMatrix",
    "SingularNoiseError",
    "SystemSpec",
    "finite_diff_jacobian",
    "maier_stein",
    "maier_stein_potential",
    "polynomial_drift",
    "zero_drift",
]


class SingularNoiseError(ValueError):
    """The noise matrix has no usable inverse where one is required."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DriftField:
    """Vector field with analytic or finite-difference derivatives.

    ``fn`` and ``jacobian_fn`` must broadcast over leading axes: points of
    shape (..., d) map to values (..., d) and Jacobians (..., d, d), with
    J[i, j] = d f^i / d z_j.  ``second_derivs_fn``, when present, returns
    for each i the sum over j of d^2 f^j / dz_i dz_j, i.e. the gradient of
    the divergence of f; when absent it is recovered by central finite
    differences of the Jacobian trace with step max(1e-5, 1e-5 |z|).
    """

    d: int
    fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Callable[[np.ndarray], np.ndarray]
    second_derivs_fn: Callable[[np.ndarray], np.ndarray] | None = None
    meta: dict | None = None

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be at least 1")

    def eval(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        return np.asarray(self.fn(point), dtype=float)

    def jacobian(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        return np.asarray(self.jacobian_fn(point), dtype=float)

    def second_derivs(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if self.second_derivs_fn is not None:
            return np.asarray(self.second_derivs_fn(point), dtype=float)
        return self._fd_second_derivs(point)

    def _fd_second_derivs(self, point: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(point, axis=-1, keepdims=True)
        h = np.maximum(1e-5, 1e-5 * norm)
        out = np.empty(point.shape, dtype=float)
        for i in range(self.d):
            step = np.zeros(self.d)
            step[i] = 1.0
            tr_plus = np.trace(self.jacobian(point + h * step), axis1=-2, axis2=-1)
            tr_minus = np.trace(self.jacobian(point - h * step), axis1=-2, axis2=-1)
            out[..., i] = (tr_plus - tr_minus) / (2.0 * np.squeeze(h, axis=-1))
        return out


def finite_diff_jacobian(field: DriftField, point, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a drift field at a single point.

    Exists to cross-check analytic Jacobians; O(h^2) accurate.
    """
    if not h > 0.0:
        raise ValueError("step must be positive")
    point = np.asarray(point, dtype=float).reshape(field.d)
    jac = np.empty((field.d, field.d))
    for j in range(field.d):
        step = np.zeros(field.d)
        step[j] = h
        jac[:, j] = (field.eval(point + step) - field.eval(point - step)) / (2.0 * h)
    return jac


class NoiseMatrix:
    """Square noise matrix B with its precomputed inverse.

    The constructor insists on invertibility by default, since the action
    functional and everything downstream of it need B^-1.  Pass
    ``require_invertible=False`` to carry a degenerate matrix for
    simulation-only work (e.g. the deterministic ODE limit B = 0);
    touching ``B_inv`` on such an instance raises
    :class:`SingularNoiseError`.
    """

    def __init__(self, B, require_invertible: bool = True) -> None:
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError(f"noise matrix must be square, got shape {B.shape}")
        if not np.all(np.isfinite(B)):
            raise ValueError("noise matrix entries must be finite")
        self._B = _readonly(B)
        d = B.shape[0]
        try:
            inv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            inv = None
        if inv is not None and not np.all(np.abs(B @ inv - np.eye(d)) <= 1e-12):
            inv = None
        if inv is None:
            if require_invertible:
                raise SingularNoiseError(
                    "noise matrix is singular (or too ill-conditioned to invert reliably)"
                )
            self._B_inv = None
            self._cond = float("inf")
        else:
            self._B_inv = _readonly(inv)
            self._cond = float(np.linalg.cond(B))

    @property
    def d(self) -> int:
        return self._B.shape[0]

    @property
    def B(self) -> np.ndarray:
        return self._B

    @property
    def B_inv(self) -> np.ndarray:
        if self._B_inv is None:
            raise SingularNoiseError(
                "degenerate noise matrix has no inverse; the action and "
                "Euler-Lagrange routes require an invertible B"
            )
        return self._B_inv

    @property
    def invertible(self) -> bool:
        return self._B_inv is not None

    @property
    def condition_estimate(self) -> float:
        return self._cond

    def is_diagonal(self) -> bool:
        return bool(np.all(self._B == np.diag(np.diagonal(self._B))))

    @classmethod
    def identity(cls, d: int) -> "NoiseMatrix":
        return cls(np.eye(d))

    @classmethod
    def diagonal(cls, entries, require_invertible: bool = True) -> "NoiseMatrix":
        return cls(np.diag(np.asarray(entries, dtype=float)),
                   require_invertible=require_invertible)

    def __repr__(self) -> str:
        return f"NoiseMatrix(d={self.d}, cond={self._cond:.3g})"


@dataclass(frozen=True)
class BoundaryPair:
    """Endpoint data for the path problem: z(0) = z0, z(T) = z1."""

    z0: np.ndarray
    z1: np.ndarray
    T: float = 1.0

    def __post_init__(self) -> None:
        z0 = _readonly(np.asarray(self.z0, dtype=float).ravel())
        z1 = _readonly(np.asarray(self.z1, dtype=float).ravel())
        if z0.shape != z1.shape:
            raise ValueError(f"endpoint shapes differ: {z0.shape} vs {z1.shape}")
        if not (np.all(np.isfinite(z0)) and np.all(np.isfinite(z1))):
            raise ValueError("endpoints must be finite")
        if not self.T > 0.0:
            raise ValueError(f"horizon T must be positive, got {self.T}")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "z1", z1)

    @property
    def d(self) -> int:
        return self.z0.shape[0]


_DIGEST_PROBE_KEY = 0x0FDA7A


@dataclass(frozen=True)
class SystemSpec:
    """Complete problem definition: drift + Gaussian noise + jump components.

    Construction folds any nonzero stable location parameters mu into the
    drift (the location part of a Levy increment over dt is exactly mu dt,
    indistinguishable from drift), after which every stored component has
    mu = 0.  Non-null components must have alpha < 1.
    """

    drift: DriftField
    noise: NoiseMatrix
    levy: tuple[StableComponent, ...]
    x0: np.ndarray

    def __post_init__(self) -> None:
        d = self.drift.d
        if self.noise.d != d:
            raise ValueError(
                f"noise dimension {self.noise.d} does not match drift dimension {d}"
            )
        components = tuple(self.levy)
        if len(components) != d:
            raise ValueError(
                f"need one Levy component per coordinate: got {len(components)} for d = {d}"
            )
        for j, comp in enumerate(components):
            if not check_bounded_variation(comp):
                raise BoundedVariationError(
                    f"component {j}: alpha = {comp.alpha} >= 1, sample paths "
                    "would have unbounded variation"
                )
        x0 = _readonly(np.asarray(self.x0, dtype=float).ravel())
        if x0.shape != (d,):
            raise ValueError(f"x0 must have shape ({d},), got {x0.shape}")
        if not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be finite")

        mu = np.array([0.0 if c.null else c.mu for c in components])
        drift = self.drift
        if np.any(mu != 0.0):
            shift = _readonly(mu)
            base = drift
            meta = dict(base.meta or {})
            meta["mu_folded"] = tuple(float(v) for v in mu)
            drift = DriftField(
                d=d,
                fn=lambda p, _b=base, _s=shift: _b.eval(p) + _s,
                jacobian_fn=base.jacobian_fn,
                second_derivs_fn=base.second_derivs_fn,
                meta=meta,
            )
            components = tuple(
                c if c.null else replace(c, mu=0.0) for c in components
            )

        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "levy", components)
        object.__setattr__(self, "x0", x0)

    @property
    def d(self) -> int:
        return self.drift.d

    @property
    def digest(self) -> str:
        """Hex fingerprint of the system, stable across processes.

        Hashes the dimension, x0, noise matrix bytes, the stable
        parameters, and drift values at a fixed pseudo-random probe set,
        so two systems that agree on all of those share a digest.
        """
        h = hashlib.sha256()
        h.update(np.int64(self.d).tobytes())
        h.update(self.x0.tobytes())
        h.update(self.noise.B.tobytes())
        for comp in self.levy:
            h.update(repr((comp.null, comp.alpha, comp.sigma, comp.beta, comp.mu)).encode())
        rng = np.random.Generator(np.random.Philox(key=_DIGEST_PROBE_KEY))
        probes = rng.uniform(-1.0, 1.0, size=(5, self.d))
        h.update(np.ascontiguousarray(self.drift.eval(probes)).tobytes())
        return h.hexdigest()


def maier_stein(gamma: float = 1.0) -> SystemSpec:
    """Two-well planar benchmark system.

        f(x, y) = (x - x^3 - gamma x y^2, -(1 + x^2) y)

    Stable nodes sit at (+-1, 0) and the origin is a saddle.  The drift
    is of gradient type exactly at gamma = 1, which is where the
    curl-free structure required by the second-order reduction holds.
    Noise is the identity and all jump components are null; callers who
    want jumps swap in their own components.
    """
    gamma = float(gamma)
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    def fn(p):
        x, y = p[..., 0], p[..., 1]
        return np.stack([x - x ** 3 - gamma * x * y * y, -(1.0 + x * x) * y], axis=-1)

    def jacobian_fn(p):
        x, y = p[..., 0], p[..., 1]
        row0 = np.stack([1.0 - 3.0 * x * x - gamma * y * y, -2.0 * gamma * x * y], axis=-1)
        row1 = np.stack([-2.0 * x * y, -(1.0 + x * x)], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def second_derivs_fn(p):
        x, y = p[..., 0], p[..., 1]
        return np.stack([-8.0 * x, -2.0 * gamma * y], axis=-1)

    drift = DriftField(2, fn, jacobian_fn, second_derivs_fn,
                       meta={"kind": "maier_stein", "gamma": gamma})
    return SystemSpec(
        drift=drift,
        noise=NoiseMatrix.identity(2),
        levy=(null_component(), null_component()),
        x0=np.array([1.0, 0.0]),
    )


def maier_stein_potential(point) -> float:
    """Potential V with -grad V equal to the gamma = 1 two-well drift.

        V(x, y) = -x^2/2 + x^4/4 + y^2/2 + x^2 y^2 / 2
    """
    p = np.asarray(point, dtype=float)
    x, y = p[..., 0], p[..., 1]
    v = -x * x / 2.0 + x ** 4 / 4.0 + y * y / 2.0 + x * x * y * y / 2.0
    if v.ndim == 0:
        return float(v)
    return v


def polynomial_drift(d: int, terms: Sequence[Sequence[Sequence[float]]]) -> DriftField:
    """Polynomial drift assembled from coefficient lists.

    ``terms[j]`` lists the monomials of output component j, each entry
    ``[coef, e1, ..., ed]`` standing for coef * z1^e1 * ... * zd^ed with
    nonnegative integer exponents.  An empty list gives the zero
    component.  First and second derivatives are formed term by term, so
    the Jacobian and divergence-gradient are exact.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if len(terms) != d:
        raise ValueError(f"need {d} component term lists, got {len(terms)}")

    coef_list: list[np.ndarray] = []
    expo_list: list[np.ndarray] = []
    for j, comp_terms in enumerate(terms):
        coefs = []
        expos = []
        for k, term in enumerate(comp_terms):
            term = list(term)
            if len(term) != 1 + d:
                raise ValueError(
                    f"component {j} term {k}: expected [coef, e1..e{d}], "
                    f"got {len(term)} entries"
                )
            coef = float(term[0])
            exps = term[1:]
            for e in exps:
                if float(e) != int(e) or int(e) < 0:
                    raise ValueError(
                        f"component {j} term {k}: exponents must be "
                        f"nonnegative integers, got {exps}"
                    )
            coefs.append(coef)
            expos.append([int(e) for e in exps])
        coef_list.append(np.asarray(coefs, dtype=float))
        expo_list.append(np.asarray(expos, dtype=float).reshape(len(coefs), d))

    def eval_terms(p, coefs, expos):
        if coefs.size == 0:
            return np.zeros(p.shape[:-1])
        mono = np.prod(p[..., None, :] ** expos, axis=-1)
        return np.sum(coefs * mono, axis=-1)

    def diff(coefs, expos, i):
        # d/dz_i of sum coef * prod z^e, dropping terms where e_i = 0
        keep = expos[:, i] > 0
        new_coefs = coefs[keep] * expos[keep, i]
        new_expos = expos[keep].copy()
        new_expos[:, i] -= 1.0
        return new_coefs, new_expos

    jac_terms = [[diff(coef_list[j], expo_list[j], i) for i in range(d)] for j in range(d)]
    # s_i = sum_j d/dz_i (d f^j / dz_j): differentiate the diagonal entries again
    second_terms = []
    for i in range(d):
        cs, es = [], []
        for j in range(d):
            cj, ej = jac_terms[j][j]
            ci, ei = diff(cj, ej, i)
            cs.append(ci)
            es.append(ei)
        second_terms.append((np.concatenate(cs), np.concatenate(es)))

    def fn(p):
        return np.stack([eval_terms(p, coef_list[j], expo_list[j]) for j in range(d)], axis=-1)

    def jacobian_fn(p):
        rows = []
        for j in range(d):
            rows.append(np.stack(
                [eval_terms(p, *jac_terms[j][i]) for i in range(d)], axis=-1))
        return np.stack(rows, axis=-2)

    def second_derivs_fn(p):
        return np.stack([eval_terms(p, *second_terms[i]) for i in range(d)], axis=-1)

    canonical = [[[float(c), *map(int, e)] for c, e in zip(coef_list[j], expo_list[j])]
                 for j in range(d)]
    return DriftField(d, fn, jacobian_fn, second_derivs_fn,
                      meta={"kind": "polynomial", "terms": canonical})


def zero_drift(d: int) -> DriftField:
    """The zero vector field (free particle)."""
    return polynomial_drift(d, [[] for _ in range(d)])
