"""Blind SNR estimation for linear models with left-correlated Gaussian designs.

The estimator inverts deterministic (random-matrix) predictions of the
normalized ridge-regression cost, evaluated at a small grid of penalties, to
recover the signal and noise variances from a single received vector.
"""

from .estimator import (
    LinearModel,
    RidgeSolution,
    RegressionSystem,
    SnrEstimate,
    assemble_system,
    estimate_snr,
    ml_baseline,
    ridge_solve,
    solve_system,
)
from .exceptions import (
    ConvergenceError,
    DataFormatError,
    DefinitenessError,
    DimensionError,
    RidgeSnrError,
)
from .harness import (
    MetricsRow,
    RunConfig,
    derive_rng,
    dim_sweep,
    estimate_from_files,
    lambda_sensitivity,
    run_scenario,
    verify_theorem,
)
from .numerics import EigenPair, bessel_j0, nnls_2var, spd_solve, sym_eig
from .rmt import (
    CorrelationSpectrum,
    DeterministicEquivalents,
    alpha,
    coefficients,
    solve_delta,
    trace_psi_t,
)
from .scenarios import (
    CorrelationSpec,
    DistributionSpec,
    GroundTruth,
    ScenarioDefinition,
    build_correlation,
    sample_truth,
    scenario_catalog,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "LinearModel", "RidgeSolution", "RegressionSystem", "SnrEstimate",
    "assemble_system", "estimate_snr", "ml_baseline", "ridge_solve", "solve_system",
    "ConvergenceError", "DataFormatError", "DefinitenessError",
    "DimensionError", "RidgeSnrError",
    "MetricsRow", "RunConfig", "derive_rng", "dim_sweep",
    "estimate_from_files", "lambda_sensitivity", "run_scenario",
    "verify_theorem",
    "EigenPair", "bessel_j0", "nnls_2var", "spd_solve", "sym_eig",
    "CorrelationSpectrum", "DeterministicEquivalents", "alpha",
    "coefficients", "solve_delta", "trace_psi_t",
    "CorrelationSpec", "DistributionSpec", "GroundTruth",
    "ScenarioDefinition", "build_correlation", "sample_truth",
    "scenario_catalog", "synthesize",
    "__version__",
]
