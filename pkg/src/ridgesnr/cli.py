"""Command-line front end.

Subcommands: estimate, scenario, verify-theorem, dim-sweep, lambda-sensitivity.
Exit codes: 0 success, 2 configuration/parse error, 3 numeric convergence or
definiteness failure, 4 I/O error.

Run flags left unset fall back first to the optional ``--config`` JSON file
(keys mirror RunConfig field names) and then to built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dataio, harness
from .exceptions import ConvergenceError, DataFormatError, DefinitenessError, RidgeSnrError
from .scenarios import SCENARIO_NAMES, scenario_catalog

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _parse_lambdas(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty lambda list")
    return values


def _parse_snr_range(text: str) -> tuple[float, ...]:
    """Either 'a:b:step' (inclusive) or a comma-separated list of dB values."""
    try:
        if ":" in text:
            a, b, step = (float(v) for v in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            points = []
            v = a
            while v <= b + 1e-9:
                points.append(round(v, 9))
                v += step
            return tuple(points)
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR range: {text!r} (want a:b:step or v1,v2,...)")


def _parse_dims(text: str) -> tuple[tuple[int, int], ...]:
    """Comma-separated MxK pairs, e.g. 31x30,30x35."""
    dims = []
    for token in text.split(","):
        try:
            m, k = token.lower().split("x")
            dims.append((int(m), int(k)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dims token: {token!r} (want MxK)")
    return tuple(dims)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=int, default=None,
                        help="Monte-Carlo trials per point (default 1000; 200 for verify-theorem)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    parser.add_argument("--lambdas", type=_parse_lambdas, default=None,
                        help="comma-separated penalty grid (default: scenario catalog)")
    parser.add_argument("--snr-db", type=_parse_snr_range, default=None,
                        help="SNR sweep as a:b:step or comma list (default: scenario catalog)")
    parser.add_argument("--out", default=None, help="output CSV path")
    parser.add_argument("--parallelism", default=None, metavar="N|auto",
                        help="worker processes (default 1)")
    parser.add_argument("--dump-trials", action="store_true",
                        help="also write a per-trial CSV next to --out")
    parser.add_argument("--config", default=None,
                        help="JSON file with defaults for the flags above")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ridgesnr",
                                     description="Blind SNR estimation benchmarks and tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate SNR from y / Wbar / Psi files")
    p_est.add_argument("y_path")
    p_est.add_argument("wbar_path")
    p_est.add_argument("psi_path")
    p_est.add_argument("--lambdas", type=_parse_lambdas, required=True)
    p_est.add_argument("--json", action="store_true", help="machine-readable output only")

    p_sc = sub.add_parser("scenario", help="run a catalog scenario sweep")
    p_sc.add_argument("name", choices=SCENARIO_NAMES)
    _add_run_flags(p_sc)
    p_sc.add_argument("--dump", default=None, metavar="DIR",
                      help="write the first trial's model files into DIR")

    p_vt = sub.add_parser("verify-theorem", help="Monte-Carlo check of the cost prediction")
    _add_run_flags(p_vt)

    p_ds = sub.add_parser("dim-sweep", help="dimension-robustness sweep")
    _add_run_flags(p_ds)
    p_ds.add_argument("--dims", type=_parse_dims, default=None,
                      help="comma-separated MxK pairs (default: catalog g+h dims)")

    p_ls = sub.add_parser("lambda-sensitivity", help="penalty-grid sensitivity sweep")
    _add_run_flags(p_ls)
    return parser


def _coerce_parallelism(value) -> int | None:
    if value is None or value == "auto":
        return None
    count = int(value)
    if count < 1:
        raise ValueError(f"parallelism must be positive, got {count}")
    return count


def _resolve_run_config(args: argparse.Namespace, scenario: str,
                        default_trials: int = 1000) -> harness.RunConfig:
    """Merge CLI flags, the optional JSON config, and built-in defaults."""
    payload = {}
    if getattr(args, "config", None):
        with open(args.config) as handle:
            payload = json.load(handle)
        if not isinstance(payload, dict):
            raise DataFormatError(f"{args.config}: config must be a JSON object")

    def pick(cli_value, key, fallback):
        if cli_value is not None:
            return cli_value
        return payload.get(key, fallback)

    lambdas = pick(args.lambdas, "lambda_grid", None)
    snr_points = pick(args.snr_db, "snr_points_db", None)
    dims = pick(getattr(args, "dims", None), "dims", None)
    parallelism = pick(args.parallelism, "parallelism", 1)
    return harness.RunConfig(
        scenario=scenario,
        trials=int(pick(args.trials, "trials", default_trials)),
        master_seed=int(pick(args.seed, "master_seed", 0)),
        lambda_grid=tuple(float(v) for v in lambdas) if lambdas else None,
        snr_points_db=tuple(float(v) for v in snr_points) if snr_points else None,
        output_path=pick(args.out, "output_path", None),
        parallelism=_coerce_parallelism(parallelism),
        dump_trials=bool(args.dump_trials or payload.get("dump_trials", False)),
        dims=tuple((int(m), int(k)) for m, k in dims) if dims else None,
    )


def _print_estimate(estimate, as_json: bool) -> None:
    payload = {
        "sigma_x2_hat": estimate.sigma_x2_hat,
        "sigma_n2_hat": estimate.sigma_n2_hat,
        "snr_linear": estimate.snr_linear,
        "snr_db": estimate.snr_db,
        "degenerate": estimate.degenerate,
        "fit_residual_norm": estimate.fit_residual_norm,
        "fixed_point_iters": list(estimate.fixed_point_iters),
    }
    if as_json:
        print(json.dumps(payload))
        return
    print(f"sigma_x2_hat      = {estimate.sigma_x2_hat:.10g}")
    print(f"sigma_n2_hat      = {estimate.sigma_n2_hat:.10g}")
    print(f"snr_linear        = {estimate.snr_linear:.10g}")
    print(f"snr_db            = {estimate.snr_db:.10g}")
    print(f"degenerate        = {estimate.degenerate}")
    print(f"fit residual norm = {estimate.fit_residual_norm:.4g}")
    print(f"fixed-point iters = {list(estimate.fixed_point_iters)}")


def _print_rows(rows) -> None:
    print(",".join(harness._METRICS_COLUMNS))
    for row in rows:
        print(",".join((
            dataio.format_float(row.snr_true_db), row.method, str(row.m), str(row.k),
            str(row.trials), str(row.trials_degenerate), str(row.trials_failed),
            dataio.format_float(row.mean_est_db), dataio.format_float(row.bias_db),
            dataio.format_float(row.nmse_db), dataio.format_float(row.norm_err_mean),
            dataio.format_float(row.norm_err_var), row.grid_label,
        )))


def _dump_first_trial(config: harness.RunConfig, directory: str) -> None:
    """Materialize trial 0 of the first sweep point and write its model files."""
    from .estimator import estimate_snr
    from .scenarios import sample_truth, synthesize

    definition = config.resolve_scenario()
    m, k = definition.dims
    grid = config.lambda_grid or definition.lambda_grid
    spectrum = harness._correlation_for(definition, m, config.master_seed)
    points = config.snr_points_db or definition.snr_points_db
    signal, noise = definition.specs_at(points[0])
    rng = harness.derive_rng(config.master_seed, harness.STREAM_TRIALS, 0, 0)
    truth = sample_truth(signal, noise, m, k, rng)
    model = synthesize(spectrum, truth, rng)
    estimate = estimate_snr(model, grid)
    paths = dataio.dump_model(directory, model, grid, estimate)
    print(f"dumped model files: {json.dumps(paths)}")


def _cmd_estimate(args) -> int:
    estimate, _ = harness.estimate_from_files(args.y_path, args.wbar_path,
                                              args.psi_path, args.lambdas)
    _print_estimate(estimate, args.json)
    return EXIT_OK


def _cmd_scenario(args) -> int:
    config = _resolve_run_config(args, args.name)
    if args.dump:
        _dump_first_trial(config, args.dump)
    rows = harness.run_scenario(config)
    _print_rows(rows)
    return EXIT_OK


def _cmd_verify(args) -> int:
    config = _resolve_run_config(args, "fig1", default_trials=200)
    rows = harness.verify_theorem(config)
    print("lambda,mc_mean_phi,alpha,rel_error")
    for lam, mc, a, rel in rows:
        print(",".join(dataio.format_float(v) for v in (lam, mc, a, rel)))
    print(f"# max relative error: {max(r[3] for r in rows):.6f}")
    return EXIT_OK


def _cmd_dim_sweep(args) -> int:
    config = _resolve_run_config(args, "h")
    if config.dims is None:
        dims = scenario_catalog("g").dims_list + scenario_catalog("h").dims_list
        config = harness.RunConfig(
            scenario=config.scenario, trials=config.trials,
            master_seed=config.master_seed, lambda_grid=config.lambda_grid,
            snr_points_db=config.snr_points_db, output_path=config.output_path,
            parallelism=config.parallelism, dump_trials=config.dump_trials,
            dims=dims,
        )
    rows = harness.dim_sweep(config)
    _print_rows(rows)
    return EXIT_OK


def _cmd_lambda_sensitivity(args) -> int:
    config = _resolve_run_config(args, "i")
    rows = harness.lambda_sensitivity(config)
    _print_rows(rows)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        handler = {
            "estimate": _cmd_estimate,
            "scenario": _cmd_scenario,
            "verify-theorem": _cmd_verify,
            "dim-sweep": _cmd_dim_sweep,
            "lambda-sensitivity": _cmd_lambda_sensitivity,
        }[args.command]
        return handler(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DefinitenessError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RidgeSnrError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
