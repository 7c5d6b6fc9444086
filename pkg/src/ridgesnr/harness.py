"""Monte-Carlo engine: scenario sweeps, theorem verification, dimension and
penalty-grid robustness runs, metrics aggregation, and CSV output.

Reproducibility contract: every random draw comes from a generator derived as
SeedSequence(entropy=master_seed, spawn_key=stream_key). Stream keys are
(kind, indices...) tuples with kind 0 = scenario trials, 2 = fixed design,
3 = verification draws, 4 = penalty-sensitivity trials, 5 = dimension-sweep
trials; the diag-uniform correlation draw uses the bare master seed. Results
are therefore identical for any trial schedule, and the CSV emitted by a run
is byte-identical across parallelism settings.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dataio
from .estimator import LinearModel, ml_baseline, estimate_snr, ridge_solve
from .exceptions import RidgeSnrError
from .rmt import CorrelationSpectrum, alpha, coefficients
from .scenarios import (
    CorrelationSpec,
    ScenarioDefinition,
    build_correlation,
    sample_truth,
    scenario_catalog,
    synthesize,
)

__all__ = [
    "RunConfig",
    "MetricsRow",
    "TrialRecord",
    "run_scenario",
    "verify_theorem",
    "dim_sweep",
    "lambda_sensitivity",
    "estimate_from_files",
    "derive_rng",
    "write_metrics_csv",
    "write_theorem_csv",
]

log = logging.getLogger(__name__)

STREAM_TRIALS = 0
STREAM_FIXED_DESIGN = 2
STREAM_THEOREM_DRAWS = 3
STREAM_SENSITIVITY = 4
STREAM_DIM_SWEEP = 5


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (master_seed, key); key parts must be >= 0."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    )


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one harness run.

    ``parallelism`` of None means auto (up to 8 workers); results do not
    depend on it. ``lambda_grid`` / ``snr_points_db`` of None fall back to the
    scenario catalog entry. For verification runs ``trials`` is the number of
    signal/noise draws.
    """

    scenario: str | ScenarioDefinition = "a"
    trials: int = 1000
    master_seed: int = 0
    lambda_grid: tuple[float, ...] | None = None
    snr_points_db: tuple[float, ...] | None = None
    output_path: str | None = None
    parallelism: int | None = 1
    dump_trials: bool = False
    dims: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.parallelism is not None and self.parallelism < 1:
            raise ValueError("parallelism must be positive")

    def resolve_scenario(self) -> ScenarioDefinition:
        if isinstance(self.scenario, ScenarioDefinition):
            return self.scenario
        return scenario_catalog(self.scenario, seed=self.master_seed)


@dataclass(frozen=True)
class MetricsRow:
    """Aggregated metrics for one (configuration point, method).

    mean_est_db is the mean of the per-trial dB estimates over valid trials;
    nmse and the normalized-error statistics are computed on the linear SNR
    scale, normalized by the true linear SNR. Degenerate trials (zero variance
    estimate) and failed trials are excluded from every aggregate and counted.
    With fewer than two valid trials the variance is reported as nan.
    """

    snr_true_db: float
    method: str
    m: int
    k: int
    trials: int
    trials_degenerate: int
    trials_failed: int
    mean_est_db: float
    bias_db: float
    nmse_db: float
    norm_err_mean: float
    norm_err_var: float
    grid_label: str = ""


@dataclass(frozen=True)
class TrialRecord:
    """Per-trial outcome kept for the optional dump."""

    snr_true_db: float
    method: str
    m: int
    k: int
    trial: int
    sigma_x2_hat: float
    sigma_n2_hat: float
    snr_linear: float
    snr_db: float
    degenerate: bool
    grid_label: str = ""


def _grid_label(grid) -> str:
    return ";".join(dataio.format_float(v) for v in grid)


def _snr_of(sigma_x2: float, sigma_n2: float) -> tuple[float, float]:
    if sigma_n2 > 0:
        snr = sigma_x2 / sigma_n2
        return snr, (10.0 * math.log10(snr) if snr > 0 else -math.inf)
    if sigma_x2 > 0:
        return math.inf, math.inf
    return math.nan, math.nan


def _aggregate(snr_true_db: float, method: str, m: int, k: int,
               sigmas: np.ndarray, grid_label: str = "") -> MetricsRow:
    """Fold per-trial (sigma_x2, sigma_n2) pairs into one metrics row."""
    true_lin = 10.0 ** (snr_true_db / 10.0)
    total = sigmas.shape[0]
    failed = int(np.sum(~np.isfinite(sigmas).all(axis=1)))
    est_db, errors = [], []
    degenerate = 0
    for sx, sn in sigmas:
        if not (np.isfinite(sx) and np.isfinite(sn)):
            continue
        snr, snr_db = _snr_of(sx, sn)
        if not (0.0 < snr < math.inf):
            degenerate += 1
            continue
        est_db.append(snr_db)
        errors.append((snr - true_lin) / true_lin)
    est_db = np.array(est_db)
    errors = np.array(errors)
    if est_db.size:
        mean_est_db = float(est_db.mean())
        norm_err_mean = float(errors.mean())
        mean_sq = float(np.mean(errors ** 2))
        nmse_db = 10.0 * math.log10(mean_sq) if mean_sq > 0 else -math.inf
        norm_err_var = float(errors.var(ddof=1)) if errors.size >= 2 else math.nan
    else:
        mean_est_db = norm_err_mean = nmse_db = norm_err_var = math.nan
    return MetricsRow(
        snr_true_db=snr_true_db, method=method, m=m, k=k,
        trials=total, trials_degenerate=degenerate, trials_failed=failed,
        mean_est_db=mean_est_db, bias_db=mean_est_db - snr_true_db,
        nmse_db=nmse_db, norm_err_mean=norm_err_mean, norm_err_var=norm_err_var,
        grid_label=grid_label,
    )


def _run_trial_block(spectrum: CorrelationSpectrum, definition: ScenarioDefinition,
                     m: int, k: int, grid, snr_db: float, master_seed: int,
                     key_prefix: tuple[int, ...], trial_lo: int, trial_hi: int) -> np.ndarray:
    """Run trials [trial_lo, trial_hi); returns (n, 4) of proposed/ml sigma pairs."""
    signal, noise = definition.specs_at(snr_db)
    out = np.full((trial_hi - trial_lo, 4), math.nan)
    for offset, trial in enumerate(range(trial_lo, trial_hi)):
        rng = derive_rng(master_seed, *key_prefix, trial)
        try:
            truth = sample_truth(signal, noise, m, k, rng)
            model = synthesize(spectrum, truth, rng)
            proposed = estimate_snr(model, grid)
            baseline = ml_baseline(model, truth.sigma_x2)
            out[offset] = (proposed.sigma_x2_hat, proposed.sigma_n2_hat,
                           baseline.sigma_x2_hat, baseline.sigma_n2_hat)
        except RidgeSnrError as exc:
            log.warning("trial %d at %.1f dB failed: %s", trial, snr_db, exc)
    return out


def _worker_count(config: RunConfig) -> int:
    if config.parallelism is not None:
        return config.parallelism
    return max(1, min(8, os.cpu_count() or 1))


def _run_point(executor, config: RunConfig, spectrum, definition, m, k, grid,
               snr_db: float, key_prefix: tuple[int, ...]) -> np.ndarray:
    """All trials for one sweep point, either inline or on the pool."""
    trials = config.trials
    workers = _worker_count(config)
    if executor is None or workers == 1 or trials < 2 * workers:
        return _run_trial_block(spectrum, definition, m, k, grid, snr_db,
                                config.master_seed, key_prefix, 0, trials)
    chunk = max(1, math.ceil(trials / (4 * workers)))
    futures = []
    for lo in range(0, trials, chunk):
        hi = min(trials, lo + chunk)
        futures.append((lo, executor.submit(
            _run_trial_block, spectrum, definition, m, k, grid, snr_db,
            config.master_seed, key_prefix, lo, hi)))
    out = np.full((trials, 4), math.nan)
    for lo, fut in futures:
        block = fut.result()
        out[lo:lo + block.shape[0]] = block
    return out


def _pool(config: RunConfig):
    workers = _worker_count(config)
    if workers == 1:
        return None
    return ProcessPoolExecutor(max_workers=workers)


def _correlation_for(definition: ScenarioDefinition, m: int, seed: int) -> CorrelationSpectrum:
    spec = definition.correlation
    if spec.dim != m or (spec.kind == "diag_uniform" and spec.seed is None):
        spec = replace(spec, dim=m, seed=seed if spec.kind == "diag_uniform" else spec.seed)
    return build_correlation(spec)


def _trial_records(rows_sigma, snr_db, m, k, grid_label="") -> list[TrialRecord]:
    records = []
    for trial, (sx_p, sn_p, sx_m, sn_m) in enumerate(rows_sigma):
        for method, sx, sn in (("proposed", sx_p, sn_p), ("ml", sx_m, sn_m)):
            snr, snr_db_est = _snr_of(sx, sn) if np.isfinite(sx) and np.isfinite(sn) else (math.nan, math.nan)
            records.append(TrialRecord(
                snr_true_db=snr_db, method=method, m=m, k=k, trial=trial,
                sigma_x2_hat=sx, sigma_n2_hat=sn, snr_linear=snr, snr_db=snr_db_est,
                degenerate=not (0.0 < snr < math.inf), grid_label=grid_label,
            ))
    return records


def run_scenario(config: RunConfig) -> list[MetricsRow]:
    """Sweep the scenario's SNR grid; both estimators on every trial.

    Each trial draws fresh (x0, n, Wbar) from its own stream; the correlation
    matrix is built once per run. Writes CSV when output_path is set.
    """
    definition = config.resolve_scenario()
    m, k = definition.dims
    grid = config.lambda_grid or definition.lambda_grid
    points = config.snr_points_db or definition.snr_points_db
    spectrum = _correlation_for(definition, m, config.master_seed)
    rows: list[MetricsRow] = []
    records: list[TrialRecord] = []
    pool = _pool(config)
    try:
        for point_idx, snr_db in enumerate(points):
            sigmas = _run_point(pool, config, spectrum, definition, m, k, grid,
                                snr_db, (STREAM_TRIALS, point_idx))
            rows.append(_aggregate(snr_db, "proposed", m, k, sigmas[:, :2]))
            rows.append(_aggregate(snr_db, "ml", m, k, sigmas[:, 2:]))
            if config.dump_trials:
                records.extend(_trial_records(sigmas, snr_db, m, k))
    finally:
        if pool is not None:
            pool.shutdown()
    _write_outputs(config, rows, records)
    return rows


def dim_sweep(config: RunConfig) -> list[MetricsRow]:
    """Scenario-world sweep over a list of (M, K) dimensions."""
    definition = config.resolve_scenario()
    dims = config.dims or definition.dims_list or (definition.dims,)
    grid = config.lambda_grid or definition.lambda_grid
    points = config.snr_points_db or definition.snr_points_db
    rows: list[MetricsRow] = []
    records: list[TrialRecord] = []
    pool = _pool(config)
    try:
        for dim_idx, (m, k) in enumerate(dims):
            spectrum = _correlation_for(definition, m, config.master_seed)
            for point_idx, snr_db in enumerate(points):
                sigmas = _run_point(pool, config, spectrum, definition, m, k, grid,
                                    snr_db, (STREAM_DIM_SWEEP, dim_idx, point_idx))
                rows.append(_aggregate(snr_db, "proposed", m, k, sigmas[:, :2]))
                rows.append(_aggregate(snr_db, "ml", m, k, sigmas[:, 2:]))
                if config.dump_trials:
                    records.extend(_trial_records(sigmas, snr_db, m, k))
    finally:
        if pool is not None:
            pool.shutdown()
    _write_outputs(config, rows, records)
    return rows


def lambda_sensitivity(config: RunConfig) -> list[MetricsRow]:
    """Repeat the scenario sweep for each catalog penalty grid."""
    definition = config.resolve_scenario()
    if not definition.lambda_grids:
        definition = scenario_catalog("i", seed=config.master_seed)
    m, k = definition.dims
    grids = definition.lambda_grids
    points = config.snr_points_db or definition.snr_points_db
    spectrum = _correlation_for(definition, m, config.master_seed)
    rows: list[MetricsRow] = []
    records: list[TrialRecord] = []
    pool = _pool(config)
    try:
        for grid_idx, grid in enumerate(grids):
            label = _grid_label(grid)
            for point_idx, snr_db in enumerate(points):
                sigmas = _run_point(pool, config, spectrum, definition, m, k, grid,
                                    snr_db, (STREAM_SENSITIVITY, grid_idx, point_idx))
                rows.append(_aggregate(snr_db, "proposed", m, k, sigmas[:, :2], label))
                rows.append(_aggregate(snr_db, "ml", m, k, sigmas[:, 2:], label))
                if config.dump_trials:
                    records.extend(_trial_records(sigmas, snr_db, m, k, label))
    finally:
        if pool is not None:
            pool.shutdown()
    _write_outputs(config, rows, records)
    return rows


def verify_theorem(config: RunConfig) -> list[tuple[float, float, float, float]]:
    """Compare the Monte-Carlo mean of the normalized cost to its prediction.

    One design draw is held fixed; ``config.trials`` (x0, n) pairs are drawn
    and the realized cost is averaged per penalty. Returns rows of
    (lambda, mc_mean_phi, predicted, rel_error).
    """
    definition = config.resolve_scenario()
    m, k = definition.dims
    grid = config.lambda_grid or definition.lambda_grid
    spectrum = _correlation_for(definition, m, config.master_seed)
    if definition.swept is None:
        signal, noise = definition.signal, definition.noise
    else:
        signal, noise = definition.specs_at(definition.snr_points_db[0])
    wbar = derive_rng(config.master_seed, STREAM_FIXED_DESIGN).standard_normal((m, k))
    design = spectrum.sqrt_apply(wbar)
    phi_sums = np.zeros(len(grid))
    for draw in range(config.trials):
        rng = derive_rng(config.master_seed, STREAM_THEOREM_DRAWS, draw)
        truth = sample_truth(signal, noise, m, k, rng)
        y = design @ truth.x0 + truth.n
        model = LinearModel(design=design, raw_design=wbar, spectrum=spectrum, y=y)
        for i, lam in enumerate(grid):
            phi_sums[i] += ridge_solve(model, lam).phi
    mc_means = phi_sums / config.trials
    rows = []
    for i, lam in enumerate(grid):
        coeff = coefficients(spectrum, m, k, lam)
        predicted = alpha(coeff, signal.implied_variance, noise.implied_variance)
        rel = abs(mc_means[i] - predicted) / predicted if predicted != 0 else abs(mc_means[i])
        rows.append((float(lam), float(mc_means[i]), float(predicted), float(rel)))
    if config.output_path:
        write_theorem_csv(config.output_path, config, rows)
    return rows


def estimate_from_files(y_path, wbar_path, psi_path, lambdas):
    """Estimate the SNR for user-supplied files; returns (estimate, model)."""
    model = dataio.load_model(y_path, wbar_path, psi_path)
    return estimate_snr(model, lambdas), model


# ---------------------------------------------------------------------------
# CSV output

_METRICS_COLUMNS = (
    "snr_true_db", "method", "m", "k", "trials", "trials_degenerate",
    "trials_failed", "mean_est_db", "bias_db", "nmse_db", "norm_err_mean",
    "norm_err_var", "grid_label",
)

_TRIAL_COLUMNS = (
    "snr_true_db", "method", "m", "k", "trial", "sigma_x2_hat",
    "sigma_n2_hat", "snr_linear", "snr_db", "degenerate", "grid_label",
)


def _config_header(config: RunConfig) -> list[str]:
    scenario = config.scenario if isinstance(config.scenario, str) else config.scenario.name
    parts = [
        f"scenario={scenario}",
        f"trials={config.trials}",
        f"seed={config.master_seed}",
    ]
    if config.lambda_grid:
        parts.append("lambdas=" + _grid_label(config.lambda_grid))
    if config.snr_points_db:
        parts.append("snr_points_db=" + _grid_label(config.snr_points_db))
    return [
        "# ridgesnr run",
        "# " + " ".join(parts),
    ]


def write_metrics_csv(path: str | Path, config: RunConfig, rows: list[MetricsRow]) -> None:
    lines = _config_header(config)
    lines.append(",".join(_METRICS_COLUMNS))
    for row in rows:
        lines.append(",".join((
            dataio.format_float(row.snr_true_db), row.method, str(row.m), str(row.k),
            str(row.trials), str(row.trials_degenerate), str(row.trials_failed),
            dataio.format_float(row.mean_est_db), dataio.format_float(row.bias_db),
            dataio.format_float(row.nmse_db), dataio.format_float(row.norm_err_mean),
            dataio.format_float(row.norm_err_var), row.grid_label,
        )))
    Path(path).write_text("\n".join(lines) + "\n")


def write_trials_csv(path: str | Path, config: RunConfig, records: list[TrialRecord]) -> None:
    lines = _config_header(config)
    lines.append(",".join(_TRIAL_COLUMNS))
    for r in records:
        lines.append(",".join((
            dataio.format_float(r.snr_true_db), r.method, str(r.m), str(r.k),
            str(r.trial), dataio.format_float(r.sigma_x2_hat),
            dataio.format_float(r.sigma_n2_hat), dataio.format_float(r.snr_linear),
            dataio.format_float(r.snr_db), str(int(r.degenerate)), r.grid_label,
        )))
    Path(path).write_text("\n".join(lines) + "\n")


def write_theorem_csv(path: str | Path, config: RunConfig,
                      rows: list[tuple[float, float, float, float]]) -> None:
    lines = _config_header(config)
    lines.append("lambda,mc_mean_phi,alpha,rel_error")
    for lam, mc, a, rel in rows:
        lines.append(",".join(dataio.format_float(v) for v in (lam, mc, a, rel)))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_outputs(config: RunConfig, rows: list[MetricsRow],
                   records: list[TrialRecord]) -> None:
    if not config.output_path:
        return
    write_metrics_csv(config.output_path, config, rows)
    if config.dump_trials:
        out = Path(config.output_path)
        write_trials_csv(out.with_name(out.stem + "_trials" + out.suffix), config, records)
