import json

import numpy as np
import pytest

from graphsmooth import (
    GridConfig,
    PriorSpec,
    RegressionData,
    eig,
    load_edge_list,
    make_path,
    regression_posterior,
    save_edge_list,
)
from graphsmooth.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def path100_file(tmp_path):
    f = tmp_path / "path100.txt"
    save_edge_list(make_path(100), f)
    return f


class TestGenGraph:
    def test_path_edge_count(self, tmp_path, capsys):
        out = tmp_path / "p.txt"
        assert run("gen-graph", "path", "--n", 100, "--out", out) == 0
        assert len(out.read_text().splitlines()) == 99

    def test_grid_edge_count(self, tmp_path):
        out = tmp_path / "g.txt"
        assert run("gen-graph", "grid", "--d", 2, "--side", 20, "--out", out) == 0
        assert len(out.read_text().splitlines()) == 760

    def test_ws_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert run("gen-graph", "ws", "--n", 200, "--p", 0.25, "--seed", 7, "--out", a) == 0
        assert run("gen-graph", "ws", "--n", 200, "--p", 0.25, "--seed", 7, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        g = load_edge_list(a)
        assert g.n <= 200

    def test_missing_param_is_validation_error(self, tmp_path):
        assert run("gen-graph", "path", "--out", tmp_path / "p.txt") == 1

    def test_invalid_size_is_validation_error(self, tmp_path):
        assert run("gen-graph", "path", "--n", 1, "--out", tmp_path / "p.txt") == 1


class TestSpectrum:
    def test_path3_values(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("1 2\n2 3\n")
        out = tmp_path / "s.csv"
        assert run("spectrum", "--graph", f, "--out", out) == 0
        assert out.read_text().strip() == "0,1,3"

    def test_ring4_values(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("1 2\n2 3\n3 4\n1 4\n")
        out = tmp_path / "s.csv"
        assert run("spectrum", "--graph", f, "--out", out) == 0
        assert out.read_text().strip() == "0,2,2,4"

    def test_disconnected_fails(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("1 2\n3 4\n")
        assert run("spectrum", "--graph", f, "--out", tmp_path / "s.csv") == 1

    def test_json_format(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("1 2\n2 3\n")
        out = tmp_path / "s.json"
        assert run("spectrum", "--graph", f, "--format", "json", "--out", out) == 0
        payload = json.loads(out.read_text())
        assert payload["n"] == 3
        np.testing.assert_allclose(payload["eigenvalues"], [0, 1, 3], atol=1e-9)


class TestFitGeometry:
    def test_grid_reproduces_reference_slope(self, tmp_path):
        gfile = tmp_path / "grid.txt"
        run("gen-graph", "grid", "--d", 2, "--side", 20, "--out", gfile)
        out = tmp_path / "fit"
        assert run("fit-geometry", "--graph", gfile, "--out", out) == 0
        payload = json.loads((tmp_path / "fit.json").read_text())
        assert abs(payload["r_hat"] - 2.0) < 0.1
        assert (tmp_path / "fit.csv").exists()
        assert (tmp_path / "fit.png").exists()

    def test_synthetic_zero_residual(self, tmp_path):
        out = tmp_path / "syn"
        assert run("fit-geometry", "--synthetic", "--n", 500, "--r", 1.4,
                   "--out", out, "--no-plot") == 0
        payload = json.loads((tmp_path / "syn.json").read_text())
        assert payload["residual_rms"] < 1e-12
        assert abs(payload["r_hat"] - 1.4) < 1e-9

    def test_kappa_flag_error(self, tmp_path, path100_file):
        assert run("fit-geometry", "--graph", path100_file, "--kappa", 1.5,
                   "--out", tmp_path / "x") == 1


class TestFit:
    def _write_regression_data(self, tmp_path, n=100, seed=0):
        rng = np.random.default_rng(seed)
        y = np.sin(np.arange(1, n + 1) / n * 2 * np.pi) + 0.3 * rng.standard_normal(n)
        f = tmp_path / "data.csv"
        rows = ["vertex,value"] + [f"{v},{float(y[v - 1])!r}" for v in range(1, n + 1)]
        f.write_text("\n".join(rows) + "\n")
        return f, y

    def test_regression_output_shape(self, tmp_path, path100_file):
        data, _ = self._write_regression_data(tmp_path)
        out = tmp_path / "post"
        assert run("fit", "--task", "regression", "--graph", path100_file,
                   "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                   "--sigma", 0.3, "--out", out) == 0
        lines = (tmp_path / "post.csv").read_text().strip().splitlines()
        assert lines[0] == "vertex,mean,variance"
        assert len(lines) == 101
        payload = json.loads((tmp_path / "post.json").read_text())
        assert len(payload["grid"]) == 64
        assert (tmp_path / "post.png").exists()

    def test_single_c_matches_library(self, tmp_path, path100_file):
        data, y = self._write_regression_data(tmp_path)
        out = tmp_path / "post"
        assert run("fit", "--task", "regression", "--graph", path100_file,
                   "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                   "--sigma", 0.3, "--single-c", 1.25, "--out", out,
                   "--no-plot") == 0
        rows = (tmp_path / "post.csv").read_text().strip().splitlines()[1:]
        cli_mean = np.array([float(r.split(",")[1]) for r in rows])
        s = eig(make_path(100))
        expected = regression_posterior(
            s, PriorSpec.power(alpha=1.0, r=1.0),
            RegressionData(y=y, sigma=0.3), GridConfig(c_values=(1.25,))
        ).mean
        np.testing.assert_allclose(cli_mean, expected, rtol=1e-10, atol=1e-14)

    def test_sigma_range(self, tmp_path, path100_file):
        data, _ = self._write_regression_data(tmp_path)
        out = tmp_path / "post"
        assert run("fit", "--task", "regression", "--graph", path100_file,
                   "--data", data, "--prior", "exp", "--r", 1,
                   "--sigma-range", 0.1, 1.0, "--num-c", 8, "--num-sigma", 4,
                   "--out", out, "--no-plot") == 0
        payload = json.loads((tmp_path / "post.json").read_text())
        assert len(payload["grid"]) == 32

    def test_classification_bad_labels(self, tmp_path):
        gfile = tmp_path / "g.txt"
        save_edge_list(make_path(4), gfile)
        data = tmp_path / "labels.csv"
        data.write_text("vertex,value\n1,0\n2,1\n3,2\n4,1\n")
        assert run("fit", "--task", "classification", "--graph", gfile,
                   "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                   "--out", tmp_path / "post") == 1

    def test_classification_runs(self, tmp_path):
        gfile = tmp_path / "g.txt"
        save_edge_list(make_path(6), gfile)
        data = tmp_path / "labels.csv"
        data.write_text("vertex,value\n" +
                        "\n".join(f"{v},{int(v <= 3)}" for v in range(1, 7)) + "\n")
        out = tmp_path / "post"
        assert run("fit", "--task", "classification", "--graph", gfile,
                   "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                   "--chain-length", 2000, "--burn-in", 400,
                   "--out", out, "--no-plot") == 0
        rows = (tmp_path / "post.csv").read_text().strip().splitlines()[1:]
        p = np.array([float(r.split(",")[1]) for r in rows])
        assert np.all((p > 0) & (p < 1))

    def test_data_coverage_validated(self, tmp_path, path100_file):
        data = tmp_path / "short.csv"
        data.write_text("vertex,value\n1,0.5\n")
        assert run("fit", "--task", "regression", "--graph", path100_file,
                   "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                   "--sigma", 1, "--out", tmp_path / "post") == 1


class TestSamplePrior:
    def test_writes_draws(self, tmp_path, path100_file):
        out = tmp_path / "draws.csv"
        assert run("sample-prior", "--graph", path100_file, "--prior", "power",
                   "--alpha", 1, "--r", 1, "--draws", 3, "--seed", 2,
                   "--out", out) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "draw,vertex,value"
        assert len(lines) == 1 + 3 * 100

    def test_deterministic_and_c_sensitive(self, tmp_path, path100_file):
        a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
        args = ("sample-prior", "--graph", path100_file, "--prior", "exp",
                "--r", 1, "--draws", 2, "--seed", 9)
        assert run(*args, "--out", a) == 0
        assert run(*args, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert run(*args, "--c", 0.5, "--out", c) == 0
        assert a.read_bytes() != c.read_bytes()


class TestRateExperiment:
    def test_end_to_end(self, tmp_path):
        cfg = {
            "family": "path", "sizes": [32, 64], "beta": 1.0, "C": 1.0,
            "sigma": 1.0, "prior_kind": "power", "alpha": 1.0, "r": 1.0,
            "replicates": 3, "seed": 5,
        }
        cfile = tmp_path / "cfg.json"
        cfile.write_text(json.dumps(cfg))
        out = tmp_path / "rate"
        assert run("rate-experiment", "--config", cfile, "--out", out) == 0
        payload = json.loads((tmp_path / "rate.json").read_text())
        assert payload["realized_sizes"] == [32, 64]
        assert (tmp_path / "rate.csv").exists()
        assert (tmp_path / "rate.png").exists()

    def test_bad_config_is_validation_error(self, tmp_path):
        cfile = tmp_path / "cfg.json"
        cfile.write_text(json.dumps({"family": "path"}))
        assert run("rate-experiment", "--config", cfile, "--out", tmp_path / "r") == 1


class TestDeterminism:
    def test_fit_byte_identical(self, tmp_path, path100_file):
        rng = np.random.default_rng(3)
        y = rng.standard_normal(100)
        data = tmp_path / "d.csv"
        data.write_text("vertex,value\n" +
                        "\n".join(f"{v},{float(y[v - 1])!r}" for v in range(1, 101)) + "\n")
        outs = []
        for tag in ("one", "two"):
            out = tmp_path / tag
            assert run("fit", "--task", "regression", "--graph", path100_file,
                       "--data", data, "--prior", "power", "--alpha", 1, "--r", 1,
                       "--sigma", 1, "--out", out) == 0
            outs.append(out)
        for suffix in (".csv", ".json", ".png"):
            a = outs[0].with_suffix(suffix).read_bytes()
            b = outs[1].with_suffix(suffix).read_bytes()
            assert a == b, f"{suffix} differs between identical runs"
