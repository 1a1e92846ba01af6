"""Euler-Maruyama simulation of the jump-diffusion and tube statistics.

The scheme is plain explicit Euler with whole stable increments:

    X_{k+1} = X_k + f(X_k) dt + B sqrt(dt) xi_k + dL_k,

where xi_k is standard Gaussian and dL_k collects one exact alpha-stable
increment per non-null coordinate.  Nothing is truncated by default; the
heavy tail is part of the model, not a nuisance.

Reproducibility contract: path k of an ensemble with base seed s draws
from a counter-based generator keyed by s + k, which makes every path
independent of ensemble size, chunking, and of whether its siblings were
ever generated.  Per path the draw order is fixed: first the full
(n_steps, d) Gaussian block, then, for each non-null coordinate in
ascending order, its n_steps stable increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .action import Path
from .levy import sample_stable
from .model import SystemSpec, zero_drift

__all__ = [
    "Ensemble",
    "ESCAPE_NORM",
    "GammaRatioResult",
    "SamplePath",
    "SimConfig",
    "TubeEstimate",
    "ensemble_band",
    "estimate_tube_probability",
    "gamma_ratio",
    "iter_path_chunks",
    "regenerate_ensemble",
    "simulate_ensemble",
    "simulate_path",
    "tube_probability",
]

ESCAPE_NORM = 1e6


@dataclass(frozen=True)
class SimConfig:
    """Euler-Maruyama run parameters.

    ``T / dt`` must be an integer to within 1e-9.  ``include_large_jumps``
    is a diagnostic switch: when False, any single-step stable increment
    of magnitude >= 1 is dropped, which isolates the small-jump part of
    the dynamics.  The default keeps every jump.
    """

    dt: float = 1e-3
    T: float = 1.0
    m: int = 100
    seed: int = 0
    include_large_jumps: bool = True

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.m < 1:
            raise ValueError(f"need at least one path, got m = {self.m}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(
                f"T / dt = {ratio!r} is not an integer; the grid would not "
                "reach T exactly"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass(frozen=True)
class SamplePath:
    """One trajectory, plus whether and when it escaped to |x| > 1e6."""

    path: Path
    escaped: bool
    escape_index: int | None
    seed: int


@dataclass(frozen=True)
class Ensemble:
    """A block of simulated paths with full regeneration data.

    ``paths`` has shape (m, n_steps + 1, d).  ``escape_index[i]`` is the
    first grid index at which path i was frozen, or -1 if it never
    escaped.  ``digest`` fingerprints the system so a metadata file can
    refuse to regenerate against the wrong one.
    """

    times: np.ndarray
    paths: np.ndarray
    escaped: np.ndarray
    escape_index: np.ndarray
    cfg: SimConfig
    digest: str

    def __post_init__(self) -> None:
        for arr in (self.times, self.paths, self.escaped, self.escape_index):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return self.paths.shape[0]

    @property
    def d(self) -> int:
        return self.paths.shape[2]

    @property
    def seeds(self) -> np.ndarray:
        """Per-path generator keys: base seed + path index."""
        return self.cfg.seed + np.arange(self.m, dtype=np.int64)


def _path_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _chunk_noise(system: SystemSpec, cfg: SimConfig, seeds) -> tuple[np.ndarray, np.ndarray]:
    n = cfg.n_steps
    d = system.d
    gauss = np.empty((len(seeds), n, d))
    jumps = np.zeros((len(seeds), n, d))
    for i, seed in enumerate(seeds):
        rng = _path_rng(seed)
        gauss[i] = rng.standard_normal((n, d))
        for j, comp in enumerate(system.levy):
            if comp.null:
                continue
            jumps[i, :, j] = sample_stable(comp, cfg.dt, rng, size=n)
    if not cfg.include_large_jumps:
        jumps[np.abs(jumps) >= 1.0] = 0.0
    return gauss, jumps


def iter_path_chunks(system: SystemSpec, cfg: SimConfig,
                     chunk_size: int | None = None) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (start_index, values, escaped, escape_index) blocks.

    ``values`` is (count, n_steps + 1, d).  This is the memory-safe way
    to sweep a large ensemble: consumers reduce each block and let it go.
    A path whose state leaves |x| <= 1e6 (or stops being finite) is
    frozen at its last stored value from that step on and flagged, with
    ``escape_index`` recording the first frozen grid index (-1 when the
    path never escaped).
    """
    n = cfg.n_steps
    d = system.d
    b_mat = system.noise.B
    sqrt_dt = math.sqrt(cfg.dt)
    if chunk_size is None:
        chunk_size = max(1, int(4_000_000 / ((n + 1) * d)))
    for start in range(0, cfg.m, chunk_size):
        count = min(chunk_size, cfg.m - start)
        seeds = [cfg.seed + k for k in range(start, start + count)]
        gauss, jumps = _chunk_noise(system, cfg, seeds)
        values = np.empty((count, n + 1, d))
        state = np.tile(system.x0, (count, 1))
        values[:, 0, :] = state
        alive = np.ones(count, dtype=bool)
        escape_index = np.full(count, -1, dtype=np.int64)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(n):
                drift = system.drift.eval(state)
                nxt = (state + drift * cfg.dt
                       + (gauss[:, k, :] @ b_mat.T) * sqrt_dt
                       + jumps[:, k, :])
                bad = ~np.all(np.isfinite(nxt), axis=1)
                if np.any(bad):
                    nxt[bad] = state[bad]
                far = np.linalg.norm(nxt, axis=1) > ESCAPE_NORM
                newly = alive & (bad | far)
                escape_index[newly] = k + 1
                frozen = ~alive
                if np.any(frozen):
                    nxt[frozen] = state[frozen]
                alive &= ~(bad | far)
                state = nxt
                values[:, k + 1, :] = state
        yield start, values, escape_index >= 0, escape_index


def simulate_ensemble(system: SystemSpec, cfg: SimConfig) -> Ensemble:
    """Materialize the whole ensemble in memory.

    For m * n_steps large enough to hurt, use :func:`iter_path_chunks`
    or :func:`estimate_tube_probability` instead.
    """
    n = cfg.n_steps
    times = np.linspace(0.0, cfg.T, n + 1)
    paths = np.empty((cfg.m, n + 1, system.d))
    escaped = np.empty(cfg.m, dtype=bool)
    escape_index = np.empty(cfg.m, dtype=np.int64)
    for start, values, esc, idx in iter_path_chunks(system, cfg):
        paths[start:start + values.shape[0]] = values
        escaped[start:start + values.shape[0]] = esc
        escape_index[start:start + values.shape[0]] = idx
    return Ensemble(times=times, paths=paths, escaped=escaped,
                    escape_index=escape_index, cfg=cfg, digest=system.digest)


def simulate_path(system: SystemSpec, cfg: SimConfig, seed: int) -> SamplePath:
    """One trajectory from its own generator key.

    Passing ``cfg.seed + k`` reproduces member k of the ensemble built
    from ``cfg`` bit for bit.
    """
    one = replace(cfg, m=1, seed=seed)
    times = np.linspace(0.0, cfg.T, one.n_steps + 1)
    _, values, escaped, idx = next(iter_path_chunks(system, one))
    return SamplePath(
        path=Path(times, values[0]),
        escaped=bool(escaped[0]),
        escape_index=int(idx[0]) if escaped[0] else None,
        seed=int(seed),
    )


def regenerate_ensemble(system: SystemSpec, cfg: SimConfig, digest: str) -> Ensemble:
    """Re-run an ensemble recorded in metadata, refusing a wrong system."""
    if system.digest != digest:
        raise ValueError(
            "system digest mismatch: the metadata was produced by a "
            "different system than the one supplied"
        )
    return simulate_ensemble(system, cfg)


@dataclass(frozen=True)
class TubeEstimate:
    """Monte Carlo estimate of a sup-norm tube probability."""

    estimate: float
    std_error: float
    count: int
    m: int


def _phi_on_grid(phi: Path, times: np.ndarray, d: int) -> np.ndarray:
    if phi.d != d:
        raise ValueError(f"reference path dimension {phi.d} != ensemble dimension {d}")
    if (abs(phi.grid[0] - times[0]) > 1e-12
            or abs(phi.grid[-1] - times[-1]) > 1e-12):
        raise ValueError(
            "reference path must span the simulation window "
            f"[{times[0]!r}, {times[-1]!r}]"
        )
    out = np.empty((times.shape[0], d))
    for j in range(d):
        out[:, j] = np.interp(times, phi.grid, phi.values[:, j])
    return out


def _count_inside(values: np.ndarray, escaped: np.ndarray,
                  phi_vals: np.ndarray, epsilon: float) -> int:
    dist = np.linalg.norm(values - phi_vals[None, :, :], axis=-1)
    inside = (np.max(dist, axis=1) <= epsilon) & ~escaped
    return int(np.count_nonzero(inside))


def tube_probability(ensemble: Ensemble, phi: Path, epsilon: float) -> TubeEstimate:
    """Fraction of paths staying within sup-norm epsilon of phi.

    phi is interpolated linearly onto the simulation grid.  Escaped paths
    count as outside every tube.  The standard error is the binomial
    sqrt(p(1-p)/m).
    """
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    phi_vals = _phi_on_grid(phi, ensemble.times, ensemble.d)
    count = _count_inside(ensemble.paths, ensemble.escaped, phi_vals, epsilon)
    p = count / ensemble.m
    return TubeEstimate(
        estimate=p,
        std_error=math.sqrt(p * (1.0 - p) / ensemble.m),
        count=count,
        m=ensemble.m,
    )


def estimate_tube_probability(system: SystemSpec, phi: Path, epsilon: float,
                              cfg: SimConfig) -> TubeEstimate:
    """Streaming version of :func:`tube_probability`.

    Identical in distribution and in realized value to materializing the
    ensemble with the same config and counting, but holds only one chunk
    of paths at a time.
    """
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    times = np.linspace(0.0, cfg.T, cfg.n_steps + 1)
    phi_vals = _phi_on_grid(phi, times, system.d)
    count = 0
    for _, values, escaped, _idx in iter_path_chunks(system, cfg):
        count += _count_inside(values, escaped, phi_vals, epsilon)
    p = count / cfg.m
    return TubeEstimate(
        estimate=p,
        std_error=math.sqrt(p * (1.0 - p) / cfg.m),
        count=count,
        m=cfg.m,
    )


@dataclass(frozen=True)
class GammaRatioResult:
    """Ratio of tube probabilities against the driftless reference.

    ``defined`` is False when the reference tube count is zero, in which
    case the ratio and its error are NaN.
    """

    estimate: float
    std_error: float
    numerator: TubeEstimate
    denominator: TubeEstimate
    defined: bool


_REFERENCE_SEED_OFFSET = 2 ** 32


def gamma_ratio(system: SystemSpec, phi: Path, epsilon: float,
                cfg: SimConfig) -> GammaRatioResult:
    """Tube probability of the system relative to the driftless process.

    The reference runs the same noise (Gaussian and jumps alike) with
    zero drift from the origin, against the zero path, using an
    independent seed block (base seed offset by 2^32).  Errors combine in
    quadrature through the usual delta method for a ratio.
    """
    numerator = estimate_tube_probability(system, phi, epsilon, cfg)
    reference = SystemSpec(
        drift=zero_drift(system.d),
        noise=system.noise,
        levy=system.levy,
        x0=np.zeros(system.d),
    )
    zero_path = Path(np.linspace(0.0, cfg.T, 3), np.zeros((3, system.d)))
    den_cfg = replace(cfg, seed=cfg.seed + _REFERENCE_SEED_OFFSET)
    denominator = estimate_tube_probability(reference, zero_path, epsilon, den_cfg)
    if denominator.count == 0:
        return GammaRatioResult(float("nan"), float("nan"),
                                numerator, denominator, defined=False)
    ratio = numerator.estimate / denominator.estimate
    if numerator.count == 0:
        err = 0.0
    else:
        err = ratio * math.sqrt(
            (numerator.std_error / numerator.estimate) ** 2
            + (denominator.std_error / denominator.estimate) ** 2
        )
    return GammaRatioResult(ratio, err, numerator, denominator, defined=True)


@dataclass(frozen=True)
class BandReport:
    """Per-time tube coverage of an ensemble around a reference path."""

    times: np.ndarray
    coverage: np.ndarray
    epsilon: float

    def __post_init__(self) -> None:
        self.times.setflags(write=False)
        self.coverage.setflags(write=False)


def ensemble_band(ensemble: Ensemble, phi: Path, epsilon: float) -> BandReport:
    """Fraction of paths within epsilon of phi at each grid time.

    An escaped path counts as outside from its escape index onward (its
    frozen tail is an artifact, not a trajectory).
    """
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    phi_vals = _phi_on_grid(phi, ensemble.times, ensemble.d)
    dist = np.linalg.norm(ensemble.paths - phi_vals[None, :, :], axis=-1)
    inside = dist <= epsilon
    n_nodes = ensemble.times.shape[0]
    esc = ensemble.escaped
    if np.any(esc):
        node_idx = np.arange(n_nodes)[None, :]
        frozen = esc[:, None] & (node_idx >= ensemble.escape_index[:, None])
        inside &= ~frozen
    coverage = inside.mean(axis=0)
    return BandReport(times=ensemble.times.copy(), coverage=coverage, epsilon=epsilon)
