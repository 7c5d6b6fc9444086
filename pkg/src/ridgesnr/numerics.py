"""Dense numerical kernels: symmetric eigendecomposition, SPD solve, Bessel J0,
and an exact two-variable nonnegative least-squares solver.

The eigendecomposition and the SPD solve are thin validated fronts over
LAPACK (via numpy/scipy); the NNLS solver is specialized to two unknowns and
solved exactly by enumerating the four possible active sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
import scipy.linalg as sla
import scipy.special

from .exceptions import DefinitenessError, DimensionError

__all__ = ["EigenPair", "sym_eig", "spd_solve", "bessel_j0", "nnls_2var"]


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Spectral decomposition A = V diag(w) V^T with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(a, name: str = "A") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise DimensionError(f"{name} contains non-finite entries")
    return a


def sym_eig(a) -> EigenPair:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input must be square and symmetric to a 1e-12 relative tolerance;
    asymmetry beyond that raises DimensionError rather than being silently
    symmetrized.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"matrix must be square, got {n}x{m}")
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise DimensionError("matrix is not symmetric within 1e-12 relative tolerance")
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    order = np.argsort(w)[::-1]
    return EigenPair(eigenvalues=w[order], eigenvectors=v[:, order])


def spd_solve(a, b) -> np.ndarray:
    """Solve A x = b for symmetric positive-definite A via Cholesky."""
    a = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"right-hand side length {b.shape[0]} != matrix order {a.shape[0]}")
    try:
        factor = sla.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise DefinitenessError(f"matrix is not positive definite: {exc}") from exc
    return sla.cho_solve(factor, b, check_finite=False)


def bessel_j0(x: float) -> float:
    """Zero-order Bessel function of the first kind."""
    if not np.isfinite(x):
        raise ValueError("bessel_j0 requires a finite argument")
    return float(scipy.special.j0(x))


def nnls_2var(xi, phi) -> tuple[np.ndarray, float]:
    """Minimize 0.5*||phi - Xi @ sigma||^2 subject to sigma >= 0, for Xi with 2 columns.

    Solved exactly: the optimum of this convex QP zeroes some subset of the
    variables and solves unconstrained least squares over the rest, so
    enumerating the four candidate active sets and keeping the feasible one
    with the smallest objective is exhaustive. Rank-deficient subproblems fall
    back to the minimum-norm solution; the all-zero candidate is always
    feasible, so the solver never fails.

    Returns (sigma, residual_norm) with residual_norm = ||phi - Xi @ sigma||_2.
    """
    xi = _as_matrix(xi, "Xi")
    phi = np.asarray(phi, dtype=float)
    n = xi.shape[0]
    if xi.shape[1] != 2:
        raise DimensionError(f"Xi must have exactly 2 columns, got {xi.shape[1]}")
    if phi.shape != (n,):
        raise DimensionError(f"phi length {phi.shape} does not match Xi rows {n}")
    if n < 2:
        raise DimensionError("need at least 2 rows to fit 2 variables")
    if not np.all(np.isfinite(phi)):
        raise DimensionError("phi contains non-finite entries")

    best_sigma = None
    best_obj = np.inf
    for zeroed in product((False, True), repeat=2):
        sigma = np.zeros(2)
        free = [j for j in range(2) if not zeroed[j]]
        if free:
            sol, *_ = np.linalg.lstsq(xi[:, free], phi, rcond=None)
            sigma[free] = sol
        if np.any(sigma < 0):
            continue
        obj = 0.5 * np.sum((phi - xi @ sigma) ** 2)
        if obj < best_obj:
            best_obj = obj
            best_sigma = sigma
    residual = float(np.linalg.norm(phi - xi @ best_sigma))
    return best_sigma, residual
