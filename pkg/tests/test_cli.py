import json

import pytest

from zeromat import load_factors, parse_ratings_csv
from zeromat.cli import main

FAST = ["--k", "3", "--iters", "200", "--epochs", "4"]


def run_cli(*args):
    return main([str(a) for a in args])


class TestGen:
    def test_writes_parseable_csv(self, tmp_path):
        out = tmp_path / "data.csv"
        rc = run_cli(
            "gen", "--users", 15, "--items", 10, "--per-user", 3,
            "--zipf-s", 1.0, "--lambda", 0.0, "--r-max", 5, "--seed", 3, "--out", out,
        )
        assert rc == 0
        ds = parse_ratings_csv(out)
        assert len(ds) == 45

    def test_stdout_when_no_out(self, capsys):
        rc = run_cli("gen", "--users", 4, "--items", 3, "--per-user", 2, "--seed", 1)
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("user,item,rating\n")
        assert len(out.splitlines()) == 9


class TestCompare:
    def test_synthetic_to_csv_file(self, tmp_path):
        out = tmp_path / "report.csv"
        rc = run_cli(
            "compare", "--users", 30, "--items", 20, "--per-user", 5,
            *FAST, "--seed", 9, "--out", out,
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,mae,matthew_degree,zipf_slope,seed,k,eta,iterations"
        assert [line.split(",")[0] for line in lines[1:]] == [
            "zeromat", "pmf", "random", "ground_truth",
        ]

    def test_json_format(self, tmp_path):
        out = tmp_path / "report.json"
        rc = run_cli(
            "compare", "--users", 30, "--items", 20, "--per-user", 5,
            *FAST, "--seed", 9, "--format", "json", "--out", out,
        )
        assert rc == 0
        parsed = json.loads(out.read_text())
        assert len(parsed) == 4

    def test_identical_flags_identical_bytes(self, tmp_path):
        args = [
            "compare", "--users", 30, "--items", 20, "--per-user", 5,
            *FAST, "--seed", 9,
        ]
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(*args, "--out", out_a) == 0
        assert run_cli(*args, "--out", out_b) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_csv_data_source(self, tmp_path):
        data = tmp_path / "data.csv"
        run_cli("gen", "--users", 25, "--items", 15, "--per-user", 4, "--seed", 2,
                "--out", data)
        rc = run_cli("compare", "--data", data, *FAST, "--seed", 1, "--out",
                     tmp_path / "r.csv")
        assert rc == 0

    def test_movielens_data_source(self, tmp_path):
        data = tmp_path / "ratings.dat"
        lines = [f"{u}::{i}::{(u * i) % 5 + 1}::0" for u in range(1, 11) for i in range(1, 9)]
        data.write_text("\n".join(lines) + "\n")
        rc = run_cli("compare", "--data", data, *FAST, "--seed", 1, "--out",
                     tmp_path / "r.csv")
        assert rc == 0

    def test_both_sources_is_an_error(self, tmp_path, capsys):
        rc = run_cli("compare", "--data", "x.csv", "--users", 5, "--items", 5,
                     "--per-user", 2)
        assert rc == 1
        assert "exactly one data source" in capsys.readouterr().err

    def test_no_source_is_an_error(self, capsys):
        assert run_cli("compare") == 1
        assert "exactly one data source" in capsys.readouterr().err

    def test_missing_file_is_an_error(self, capsys):
        assert run_cli("compare", "--data", "/nonexistent/ratings.dat") == 1
        assert "error:" in capsys.readouterr().err


class TestLockstate:
    def test_small_sweep(self, tmp_path):
        out = tmp_path / "curve.csv"
        rc = run_cli(
            "lockstate", "--users", 25, "--items", 15, "--per-user", 4,
            "--lambda", "0,1", "--replicates", 2, *FAST, "--seed", 5, "--out", out,
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "lambda,zeromat_mae,pmf_mae,random_mae,replicates"
        assert len(lines) == 3
        assert lines[1].startswith("0.000000,")
        assert lines[2].startswith("1.000000,")


class TestTrain:
    def test_zeromat_model_round_trips(self, tmp_path):
        out = tmp_path / "model.txt"
        rc = run_cli("train", "--method", "zeromat", "--users", 8, "--items", 6,
                     "--k", 3, "--iters", 100, "--seed", 2, "--out", out)
        assert rc == 0
        loaded = load_factors(out)
        assert loaded.model.user_factors.shape == (8, 3)
        assert loaded.model.item_factors.shape == (6, 3)
        assert loaded.epsilon == 1e-6

    def test_pmf_needs_data(self, capsys):
        assert run_cli("train", "--method", "pmf", "--out", "/tmp/unused.txt") == 1
        assert "needs --data" in capsys.readouterr().err

    def test_pmf_from_csv(self, tmp_path):
        data = tmp_path / "data.csv"
        run_cli("gen", "--users", 12, "--items", 8, "--per-user", 3, "--seed", 4,
                "--out", data)
        out = tmp_path / "pmf.txt"
        rc = run_cli("train", "--method", "pmf", "--data", data, "--k", 2,
                     "--epochs", 3, "--out", out)
        assert rc == 0
        assert load_factors(out).model.user_factors.shape == (12, 2)

    def test_zeromat_needs_dimensions(self, capsys):
        assert run_cli("train", "--method", "zeromat", "--out", "/tmp/unused.txt") == 1
        assert "dimensions" in capsys.readouterr().err
