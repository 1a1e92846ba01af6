"""Most probable transition paths for jump diffusions with heavy tails.

The model class is an additive-noise SDE

    dX = f(X) dt + B dW + dL,

where L carries independent alpha-stable jump components with alpha < 1.
For paths pinned at both ends, the relative likelihood of a tube around
a smooth path phi is governed by an action functional whose Lagrangian
couples the drift mismatch to a divergence correction; the small jumps
enter only through their mean drift eta.  This package computes eta,
evaluates the action, solves for its minimizers by two independent
routes, simulates the SDE, and estimates tube probabilities, with a CLI
on top.
"""

from .action import (
    ActionReport,
    Path,
    SymmetryReport,
    action_of_path,
    check_poincare_symmetry,
    lagrangian,
)
from .benchmark import BenchmarkReport, benchmark_system, run_benchmark
from .bvp import (
    BlowUpError,
    ShootingConfig,
    SolveResult,
    el_diagnostics,
    integrate_second_order,
    minimize_action,
    shoot,
    solve_both,
)
from .euler_lagrange import (
    SecondOrderField,
    SymmetryWarning,
    WrongReductionError,
    el_residual,
    maier_stein_rhs,
    make_second_order_field,
    newton_rhs,
)
from .levy import (
    BoundedVariationError,
    EtaVector,
    StableComponent,
    check_bounded_variation,
    eta,
    null_component,
    sample_stable,
    stable_coeffs,
    stable_component,
)
from .model import (
    BoundaryPair,
    DriftField,
    NoiseMatrix,
    SingularNoiseError,
    SystemSpec,
    finite_diff_jacobian,
    maier_stein,
    maier_stein_potential,
    polynomial_drift,
    zero_drift,
)
from .simulate import (
    ESCAPE_NORM,
    BandReport,
    Ensemble,
    GammaRatioResult,
    SamplePath,
    SimConfig,
    TubeEstimate,
    ensemble_band,
    estimate_tube_probability,
    gamma_ratio,
    iter_path_chunks,
    regenerate_ensemble,
    simulate_ensemble,
    simulate_path,
    tube_probability,
)

__version__ = "0.1.0"

__all__ = [
    "ActionReport",
    "BandReport",
    "BenchmarkReport",
    "BlowUpError",
    "BoundaryPair",
    "BoundedVariationError",
    "DriftField",
    "ESCAPE_NORM",
    "Ensemble",
    "EtaVector",
    "GammaRatioResult",
    "NoiseMatrix",
    "Path",
    "SamplePath",
    "SecondOrderField",
    "ShootingConfig",
    "SimConfig",
    "SingularNoiseError",
    "SolveResult",
    "StableComponent",
    "SymmetryReport",
    "SymmetryWarning",
    "SystemSpec",
    "TubeEstimate",
    "WrongReductionError",
    "action_of_path",
    "benchmark_system",
    "check_bounded_variation",
    "check_poincare_symmetry",
    "el_diagnostics",
    "el_residual",
    "ensemble_band",
    "estimate_tube_probability",
    "eta",
    "finite_diff_jacobian",
    "gamma_ratio",
    "integrate_second_order",
    "iter_path_chunks",
    "lagrangian",
    "maier_stein",
    "maier_stein_potential",
    "maier_stein_rhs",
    "make_second_order_field",
    "minimize_action",
    "newton_rhs",
    "null_component",
    "polynomial_drift",
    "regenerate_ensemble",
    "run_benchmark",
    "sample_stable",
    "shoot",
    "simulate_ensemble",
    "simulate_path",
    "solve_both",
    "stable_coeffs",
    "stable_component",
    "tube_probability",
    "zero_drift",
    "__version__",
]
