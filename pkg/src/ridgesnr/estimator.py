"""Blind SNR estimation from a single received vector.

The pipeline: solve the ridge problem at each penalty in a small grid, record
the normalized cost, pair each cost with the deterministic coefficients
(xi1, xi2) from :mod:`ridgesnr.rmt`, and invert the resulting n x 2 linear
system for (sigma_x^2, sigma_n^2) under a nonnegativity constraint. The SNR
estimate is their ratio. A classical maximum-likelihood baseline (residual
noise-variance estimate combined with the known signal variance) is provided
for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .exceptions import DimensionError
from .numerics import nnls_2var, spd_solve
from .rmt import CorrelationSpectrum, coefficients

__all__ = [
    "LinearModel",
    "RidgeSolution",
    "RegressionSystem",
    "SnrEstimate",
    "ridge_solve",
    "assemble_system",
    "solve_system",
    "estimate_snr",
    "ml_baseline",
]

# Aspect-ratio sanity bounds; the asymptotics assume K/M bounded away from 0 and infinity.
MIN_ASPECT = 0.01
MAX_ASPECT = 100.0

# Stand-in for lambda = 0 in the least-squares baseline, small enough that the
# ridge solution is the (minimum-norm) LS solution to working precision.
LS_EPSILON = 1e-10


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Observation y = W x0 + n with W = Psi^(1/2) Wbar.

    ``design`` is the composed W; ``raw_design`` keeps Wbar for file dumps and
    diagnostics. The Gram matrix W^T W is cached since every penalty in a grid
    reuses it.
    """

    design: np.ndarray
    raw_design: np.ndarray
    spectrum: CorrelationSpectrum
    y: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.design, dtype=float)
        wbar = np.asarray(self.raw_design, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "design", w)
        object.__setattr__(self, "raw_design", wbar)
        object.__setattr__(self, "y", y)
        if w.ndim != 2:
            raise DimensionError("design must be a matrix")
        m, k = w.shape
        if wbar.shape != (m, k):
            raise DimensionError(f"raw design shape {wbar.shape} != design shape {w.shape}")
        if y.shape != (m,):
            raise DimensionError(f"observation length {y.shape} != design rows {m}")
        if self.spectrum.dim != m:
            raise DimensionError(f"correlation dim {self.spectrum.dim} != design rows {m}")
        aspect = k / m
        if not (MIN_ASPECT <= aspect <= MAX_ASPECT):
            raise DimensionError(f"aspect ratio K/M = {aspect:.4g} outside [{MIN_ASPECT}, {MAX_ASPECT}]")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(y))):
            raise DimensionError("model contains non-finite entries")

    @property
    def m(self) -> int:
        return self.design.shape[0]

    @property
    def k(self) -> int:
        return self.design.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.design.T @ self.design

    @cached_property
    def wty(self) -> np.ndarray:
        return self.design.T @ self.y


@dataclass(frozen=True, eq=False)
class RidgeSolution:
    """Ridge solution and its normalized cost at one penalty."""

    lam: float
    x_hat: np.ndarray
    phi: float


@dataclass(frozen=True, eq=False)
class RegressionSystem:
    """Stacked per-penalty system Xi @ sigma ~ phi used to recover the variances."""

    lambdas: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    equivalents: tuple
    residual: np.ndarray | None = None


@dataclass(frozen=True)
class SnrEstimate:
    """Estimated (sigma_x^2, sigma_n^2) and the implied SNR.

    ``snr_linear`` is inf when the noise estimate is zero (with a positive
    signal estimate), 0 when the signal estimate is zero, and nan when both
    are zero; ``degenerate`` is True in exactly those cases.
    """

    sigma_x2_hat: float
    sigma_n2_hat: float
    snr_linear: float
    snr_db: float
    fit_residual_norm: float = 0.0
    fixed_point_iters: tuple = field(default=())

    @property
    def degenerate(self) -> bool:
        return not (0.0 < self.snr_linear < math.inf)


def _snr_fields(sigma_x2: float, sigma_n2: float) -> tuple[float, float]:
    if sigma_n2 > 0:
        snr = sigma_x2 / sigma_n2
        snr_db = 10.0 * math.log10(snr) if snr > 0 else -math.inf
    elif sigma_x2 > 0:
        snr, snr_db = math.inf, math.inf
    else:
        snr, snr_db = math.nan, math.nan
    return snr, snr_db


def ridge_solve(model: LinearModel, lam: float) -> RidgeSolution:
    """Solve min_x ||y - W x||^2 + lam ||x||^2 and evaluate the normalized cost.

    The normal equations (W^T W + lam I) x = W^T y are solved by Cholesky; the
    cost is evaluated directly from the residual so it is nonnegative even
    when the two terms nearly cancel.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    k = model.k
    x_hat = spd_solve(model.gram + lam * np.eye(k), model.wty)
    resid = model.y - model.design @ x_hat
    phi = (float(resid @ resid) + lam * float(x_hat @ x_hat)) / k
    return RidgeSolution(lam=lam, x_hat=x_hat, phi=phi)


def _validated_grid(lambdas) -> np.ndarray:
    grid = np.asarray(lambdas, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DimensionError("need at least 2 penalty values")
    if np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise ValueError("penalty values must be positive and finite")
    if np.unique(grid).size != grid.size:
        raise ValueError("penalty values must be distinct")
    return grid


def assemble_system(model: LinearModel, lambdas) -> RegressionSystem:
    """Evaluate (xi1, xi2) and the realized cost at each penalty in the grid."""
    grid = _validated_grid(lambdas)
    equivs = tuple(coefficients(model.spectrum, model.m, model.k, lam) for lam in grid)
    xi = np.array([[e.xi1, e.xi2] for e in equivs])
    phi = np.array([ridge_solve(model, lam).phi for lam in grid])
    return RegressionSystem(lambdas=grid, xi=xi, phi=phi, equivalents=equivs)


def solve_system(system: RegressionSystem) -> tuple[SnrEstimate, RegressionSystem]:
    """Invert an assembled system for the variances under the sign constraint.

    Returns the estimate together with the system carrying its fit residual.
    """
    sigma, fit_residual = nnls_2var(system.xi, system.phi)
    sigma_x2, sigma_n2 = float(sigma[0]), float(sigma[1])
    snr, snr_db = _snr_fields(sigma_x2, sigma_n2)
    estimate = SnrEstimate(
        sigma_x2_hat=sigma_x2,
        sigma_n2_hat=sigma_n2,
        snr_linear=snr,
        snr_db=snr_db,
        fit_residual_norm=fit_residual,
        fixed_point_iters=tuple(e.fixed_point_iters for e in system.equivalents),
    )
    fitted = replace(system, residual=system.phi - system.xi @ sigma)
    return estimate, fitted


def estimate_snr(model: LinearModel, lambdas) -> SnrEstimate:
    """Blind SNR estimate from one observation and a penalty grid.

    Degenerate outcomes (a zero variance estimate from the nonnegativity
    constraint) are flagged on the returned estimate, never raised, so large
    Monte-Carlo sweeps are not interrupted by rare clamped trials.
    """
    estimate, _ = solve_system(assemble_system(model, lambdas))
    return estimate


def ml_baseline(model: LinearModel, true_sigma_x2: float) -> SnrEstimate:
    """Maximum-likelihood noise-variance baseline with known signal variance.

    sigma_n^2 is the least-squares residual energy divided by M (the plain ML
    normalizer, which underestimates the noise level by a factor (M - K)/M
    for tall systems). For M <= K the LS fit interpolates and the estimate
    collapses toward zero; that regime is kept as-is since it is exactly the
    failure mode the comparison is meant to expose.
    """
    if true_sigma_x2 < 0:
        raise ValueError("true signal variance must be nonnegative")
    ls = ridge_solve(model, LS_EPSILON)
    resid = model.y - model.design @ ls.x_hat
    sigma_n2 = float(resid @ resid) / model.m
    snr, snr_db = _snr_fields(true_sigma_x2, sigma_n2)
    return SnrEstimate(
        sigma_x2_hat=float(true_sigma_x2),
        sigma_n2_hat=sigma_n2,
        snr_linear=snr,
        snr_db=snr_db,
        fit_residual_norm=float(np.linalg.norm(resid)),
    )
