"""Plain-text data formats: matrices and vectors as CSV, correlation matrices
optionally as a ``diag:`` single-row shorthand, and model dump/load helpers.

All parse failures raise DataFormatError with one-based line/column context.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .estimator import LinearModel, SnrEstimate
from .exceptions import DataFormatError, DimensionError
from .rmt import CorrelationSpectrum

__all__ = [
    "read_matrix",
    "read_vector",
    "read_correlation",
    "write_matrix",
    "write_vector",
    "write_correlation",
    "load_model",
    "dump_model",
    "format_float",
]


def format_float(x: float) -> str:
    """12-significant-digit text form; round-trips aggregates within rounding."""
    if x != x:
        return "nan"
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return f"{x:.12g}"


def _parse_row(line: str, lineno: int, path: str) -> list[float]:
    values = []
    for col, cell in enumerate(line.split(","), start=1):
        cell = cell.strip()
        if not cell:
            raise DataFormatError(f"{path}:{lineno}:{col}: empty cell")
        try:
            values.append(float(cell))
        except ValueError:
            raise DataFormatError(f"{path}:{lineno}:{col}: not a number: {cell!r}") from None
    return values


def _data_lines(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataFormatError(f"{path}: cannot read: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped


def read_matrix(path: str | Path) -> np.ndarray:
    """Read a dense matrix, one CSV row per line; '#' lines are comments."""
    rows = []
    width = None
    for lineno, line in _data_lines(path):
        row = _parse_row(line, lineno, str(path))
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataFormatError(
                f"{path}:{lineno}: row has {len(row)} columns, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return np.array(rows)


def read_vector(path: str | Path) -> np.ndarray:
    """Read a vector stored either one value per line or as a single CSV row."""
    mat = read_matrix(path)
    if 1 in mat.shape:
        return mat.reshape(-1)
    raise DataFormatError(f"{path}: expected a vector, got shape {mat.shape}")


def read_correlation(path: str | Path) -> CorrelationSpectrum:
    """Read a correlation matrix, dense or as a single ``diag:`` prefixed row."""
    for lineno, line in _data_lines(path):
        if line.startswith("diag:"):
            diag = _parse_row(line[len("diag:"):], lineno, str(path))
            try:
                return CorrelationSpectrum.from_diagonal(diag)
            except (DimensionError, ValueError) as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid diagonal: {exc}") from exc
        break
    mat = read_matrix(path)
    if mat.shape[0] != mat.shape[1]:
        raise DataFormatError(f"{path}: correlation matrix must be square, got {mat.shape}")
    return CorrelationSpectrum.from_matrix(mat)


def write_matrix(path: str | Path, matrix: np.ndarray) -> None:
    lines = [",".join(format_float(v) for v in row) for row in np.atleast_2d(matrix)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_vector(path: str | Path, vector: np.ndarray) -> None:
    Path(path).write_text("\n".join(format_float(v) for v in vector) + "\n")


def write_correlation(path: str | Path, spectrum: CorrelationSpectrum) -> None:
    """Diagonal spectra use the ``diag:`` shorthand; others are written dense."""
    if spectrum.diagonal:
        payload = "diag:" + ",".join(format_float(v) for v in spectrum.eigenvalues)
        Path(path).write_text(payload + "\n")
    else:
        write_matrix(path, spectrum.matrix())


def load_model(y_path: str | Path, wbar_path: str | Path,
               psi_path: str | Path) -> LinearModel:
    """Assemble a LinearModel from files, with dimension cross-checks."""
    y = read_vector(y_path)
    wbar = read_matrix(wbar_path)
    spectrum = read_correlation(psi_path)
    if wbar.shape[0] != y.size:
        raise DimensionError(
            f"design has {wbar.shape[0]} rows but observation has {y.size} entries"
        )
    if spectrum.dim != wbar.shape[0]:
        raise DimensionError(
            f"correlation dim {spectrum.dim} != design rows {wbar.shape[0]}"
        )
    design = spectrum.sqrt_apply(wbar)
    return LinearModel(design=design, raw_design=wbar, spectrum=spectrum, y=y)


def dump_model(directory: str | Path, model: LinearModel, lambdas,
               estimate: SnrEstimate | None = None) -> dict:
    """Write y.csv, wbar.csv, psi.csv (and the grid/estimate) into a directory.

    Returns the paths written, keyed by role.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "y": directory / "y.csv",
        "wbar": directory / "wbar.csv",
        "psi": directory / "psi.csv",
        "lambdas": directory / "lambdas.csv",
    }
    write_vector(paths["y"], model.y)
    write_matrix(paths["wbar"], model.raw_design)
    write_correlation(paths["psi"], model.spectrum)
    Path(paths["lambdas"]).write_text(",".join(format_float(v) for v in lambdas) + "\n")
    if estimate is not None:
        paths["estimate"] = directory / "estimate.json"
        payload = {
            "sigma_x2_hat": estimate.sigma_x2_hat,
            "sigma_n2_hat": estimate.sigma_n2_hat,
            "snr_linear": estimate.snr_linear,
            "snr_db": estimate.snr_db,
            "degenerate": estimate.degenerate,
        }
        Path(paths["estimate"]).write_text(json.dumps(payload, indent=2) + "\n")
    return {k: str(v) for k, v in paths.items()}
