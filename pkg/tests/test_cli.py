import json

import numpy as np
import pytest

from ridgesnr import cli
from ridgesnr.dataio import (
    dump_model,
    load_model,
    read_correlation,
    read_matrix,
    write_correlation,
    write_matrix,
    write_vector,
)
from ridgesnr.exceptions import DataFormatError, DimensionError
from ridgesnr.estimator import estimate_snr
from ridgesnr.rmt import CorrelationSpectrum


@pytest.fixture()
def dumped_model(tmp_path):
    """Model files produced by the scenario dump path, plus the grid used."""
    out_dir = tmp_path / "dump"
    code = cli.main([
        "scenario", "a", "--trials", "2", "--seed", "3",
        "--snr-db", "10", "--dump", str(out_dir),
    ])
    assert code == 0
    return out_dir


class TestDataIO:
    def test_matrix_roundtrip(self, tmp_path):
        path = tmp_path / "m.csv"
        mat = np.array([[1.5, -2.25], [0.0, 3.125]])
        write_matrix(path, mat)
        assert np.array_equal(read_matrix(path), mat)

    def test_vector_single_row_or_column(self, tmp_path):
        col = tmp_path / "col.csv"
        write_vector(col, np.array([1.0, 2.0, 3.0]))
        row = tmp_path / "row.csv"
        row.write_text("1.0,2.0,3.0\n")
        from ridgesnr.dataio import read_vector
        assert np.array_equal(read_vector(col), read_vector(row))

    def test_parse_error_reports_line_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(DataFormatError, match=r"bad\.csv:2:2"):
            read_matrix(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(DataFormatError, match="columns"):
            read_matrix(path)

    def test_diag_correlation_roundtrip(self, tmp_path):
        path = tmp_path / "psi.csv"
        spec = CorrelationSpectrum.from_diagonal([0.5, 0.25, 1.0])
        write_correlation(path, spec)
        assert path.read_text().startswith("diag:")
        loaded = read_correlation(path)
        assert loaded.diagonal
        assert np.allclose(loaded.eigenvalues, spec.eigenvalues)

    def test_dense_vs_diag_path_equivalence(self, tmp_path):
        rng = np.random.default_rng(0)
        q = rng.uniform(0.2, 1.0, 10)
        diag_path = tmp_path / "psi_diag.csv"
        dense_path = tmp_path / "psi_dense.csv"
        diag_path.write_text("diag:" + ",".join(f"{v:.17g}" for v in q) + "\n")
        write_matrix(dense_path, np.diag(q))
        wbar = rng.standard_normal((10, 5))
        y = rng.standard_normal(10)
        y_path, w_path = tmp_path / "y.csv", tmp_path / "w.csv"
        write_vector(y_path, y)
        write_matrix(w_path, wbar)
        grid = [0.1, 0.5]
        est_diag = estimate_snr(load_model(y_path, w_path, diag_path), grid)
        est_dense = estimate_snr(load_model(y_path, w_path, dense_path), grid)
        assert est_diag.sigma_x2_hat == pytest.approx(est_dense.sigma_x2_hat, abs=1e-10)
        assert est_diag.sigma_n2_hat == pytest.approx(est_dense.sigma_n2_hat, abs=1e-10)

    def test_dimension_mismatch(self, tmp_path):
        write_vector(tmp_path / "y.csv", np.ones(4))
        write_matrix(tmp_path / "w.csv", np.ones((5, 2)))
        (tmp_path / "psi.csv").write_text("diag:1,1,1,1,1\n")
        with pytest.raises(DimensionError):
            load_model(tmp_path / "y.csv", tmp_path / "w.csv", tmp_path / "psi.csv")


class TestCliEstimate:
    def test_roundtrip_matches_dumped_estimate(self, dumped_model, capsys):
        grid = (dumped_model / "lambdas.csv").read_text().strip()
        code = cli.main([
            "estimate", str(dumped_model / "y.csv"), str(dumped_model / "wbar.csv"),
            str(dumped_model / "psi.csv"), "--lambdas", grid, "--json",
        ])
        assert code == 0
        reported = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        recorded = json.loads((dumped_model / "estimate.json").read_text())
        assert reported["snr_db"] == pytest.approx(recorded["snr_db"], abs=1e-6)
        assert reported["sigma_x2_hat"] == pytest.approx(recorded["sigma_x2_hat"], rel=1e-8)
        assert reported["sigma_n2_hat"] == pytest.approx(recorded["sigma_n2_hat"], rel=1e-8)

    def test_missing_file_exits_config_error(self, tmp_path, capsys):
        code = cli.main([
            "estimate", str(tmp_path / "nope.csv"), str(tmp_path / "nope.csv"),
            str(tmp_path / "nope.csv"), "--lambdas", "0.1,0.2",
        ])
        assert code == 2

    def test_bad_number_exits_config_error(self, tmp_path, capsys):
        (tmp_path / "y.csv").write_text("1.0\nbad\n")
        (tmp_path / "w.csv").write_text("1.0\n1.0\n")
        (tmp_path / "psi.csv").write_text("diag:1,1\n")
        code = cli.main([
            "estimate", str(tmp_path / "y.csv"), str(tmp_path / "w.csv"),
            str(tmp_path / "psi.csv"), "--lambdas", "0.1,0.2",
        ])
        assert code == 2

    def test_indefinite_psi_exits_numeric_error(self, tmp_path, capsys):
        write_vector(tmp_path / "y.csv", np.ones(2))
        write_matrix(tmp_path / "w.csv", np.eye(2))
        write_matrix(tmp_path / "psi.csv", np.diag([1.0, -0.5]))
        code = cli.main([
            "estimate", str(tmp_path / "y.csv"), str(tmp_path / "w.csv"),
            str(tmp_path / "psi.csv"), "--lambdas", "0.1,0.2",
        ])
        assert code == 3

    def test_mismatched_dims_exit_config_error(self, tmp_path, capsys):
        write_vector(tmp_path / "y.csv", np.ones(4))
        write_matrix(tmp_path / "w.csv", np.ones((5, 2)))
        (tmp_path / "psi.csv").write_text("diag:1,1,1,1,1\n")
        code = cli.main([
            "estimate", str(tmp_path / "y.csv"), str(tmp_path / "w.csv"),
            str(tmp_path / "psi.csv"), "--lambdas", "0.1,0.2",
        ])
        assert code == 2

    def test_nonsquare_psi_exits_config_error(self, tmp_path, capsys):
        write_vector(tmp_path / "y.csv", np.ones(2))
        write_matrix(tmp_path / "w.csv", np.eye(2))
        write_matrix(tmp_path / "psi.csv", np.ones((2, 3)))
        code = cli.main([
            "estimate", str(tmp_path / "y.csv"), str(tmp_path / "w.csv"),
            str(tmp_path / "psi.csv"), "--lambdas", "0.1,0.2",
        ])
        assert code == 2

    def test_negative_lambda_exits_config_error(self, tmp_path, capsys):
        write_vector(tmp_path / "y.csv", np.ones(2))
        write_matrix(tmp_path / "w.csv", np.eye(2))
        (tmp_path / "psi.csv").write_text("diag:1,1\n")
        code = cli.main([
            "estimate", str(tmp_path / "y.csv"), str(tmp_path / "w.csv"),
            str(tmp_path / "psi.csv"), "--lambdas=-0.1,0.2",
        ])
        assert code == 2


class TestCliRuns:
    def test_scenario_unwritable_output_exits_io_error(self, tmp_path, capsys):
        code = cli.main([
            "scenario", "a", "--trials", "2", "--snr-db", "10",
            "--out", str(tmp_path / "no-such-dir" / "x.csv"),
        ])
        assert code == 4

    def test_verify_theorem_prints_table(self, capsys):
        code = cli.main(["verify-theorem", "--trials", "5", "--lambdas", "0.5,5"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("lambda,mc_mean_phi,alpha,rel_error")
        assert "# max relative error" in out

    def test_dim_sweep_default_dims(self, capsys):
        code = cli.main(["dim-sweep", "--trials", "2", "--snr-db", "10"])
        assert code == 0
        out = capsys.readouterr().out
        assert "31,30" in out and "30,35" in out and "10,7" in out

    def test_lambda_sensitivity_runs(self, capsys):
        code = cli.main(["lambda-sensitivity", "--trials", "2", "--snr-db", "10"])
        assert code == 0
        assert len(capsys.readouterr().out.splitlines()) == 1 + 6  # header + 3 grids x 2 methods

    def test_parallelism_auto(self, tmp_path, capsys):
        out = tmp_path / "auto.csv"
        code = cli.main(["scenario", "a", "--trials", "16", "--snr-db", "10",
                         "--parallelism", "auto", "--out", str(out)])
        assert code == 0
        assert out.exists()

    def test_bad_parallelism_exits_config_error(self, capsys):
        code = cli.main(["scenario", "a", "--trials", "2", "--snr-db", "10",
                         "--parallelism", "zero"])
        assert code == 2

    def test_snr_range_parsing(self, capsys):
        code = cli.main(["scenario", "a", "--trials", "2", "--snr-db", "0:4:2"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("\nproposed") == 0  # method is a column, not a row start
        assert len([l for l in out.splitlines() if l.startswith(("0,", "2,", "4,"))]) == 6

    def test_config_file_supplies_defaults(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "trials": 3,
            "master_seed": 11,
            "snr_points_db": [10.0],
            "output_path": str(tmp_path / "from_config.csv"),
        }))
        code = cli.main(["scenario", "a", "--config", str(cfg)])
        assert code == 0
        text = (tmp_path / "from_config.csv").read_text()
        assert "trials=3" in text and "seed=11" in text

    def test_cli_flag_overrides_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"trials": 3, "snr_points_db": [10.0]}))
        out = tmp_path / "o.csv"
        code = cli.main(["scenario", "a", "--config", str(cfg),
                         "--trials", "5", "--out", str(out)])
        assert code == 0
        assert "trials=5" in out.read_text()

    def test_bad_config_json_exits_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text("{not json")
        code = cli.main(["scenario", "a", "--config", str(cfg), "--trials", "2",
                         "--snr-db", "10"])
        assert code == 2

    def test_unknown_scenario_rejected_by_parser(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["scenario", "zz", "--trials", "2"])
        assert err.value.code == 2
