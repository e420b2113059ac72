"""Command line behavior: determinism, exit codes, curve identities."""

import json
from pathlib import Path

import numpy as np
import pytest

from spikedwishart.cli import main
from spikedwishart.serialize import read_samples_csv, read_sidecar


def run_cli(args):
    return main(args)


class TestSample:
    def test_csv_and_sidecar(self, tmp_path):
        out = tmp_path / "draws"
        code = run_cli(
            [
                "sample",
                "--construction",
                "bidiagonal",
                "--beta",
                "2",
                "--n",
                "6",
                "--N",
                "4",
                "--b",
                "1.5",
                "--samples",
                "50",
                "--seed",
                "42",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        data, columns = read_samples_csv(f"{out}.csv")
        assert data.shape == (50, 4)
        assert columns == ["lambda1", "lambda2", "lambda3", "lambda4"]
        assert np.all(np.diff(data, axis=1) < 0)
        sidecar = read_sidecar(f"{out}.json")
        assert sidecar["seed"] == 42
        assert sidecar["construction"] == "bidiagonal"

    def test_identical_seed_identical_bytes(self, tmp_path):
        args = [
            "sample",
            "--construction",
            "secular",
            "--beta",
            "1",
            "--n",
            "8",
            "--N",
            "5",
            "--b",
            "2.5",
            "--samples",
            "25",
            "--seed",
            "7",
        ]
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        assert Path(f"{out1}.csv").read_bytes() == Path(f"{out2}.csv").read_bytes()

    def test_missing_seed_is_argument_error(self, tmp_path):
        code = run_cli(
            ["sample", "--construction", "pencil", "--beta", "2", "--n", "6", "--N", "3", "--out", str(tmp_path / "x")]
        )
        assert code == 2

    def test_invalid_beta_is_argument_error(self, tmp_path):
        code = run_cli(
            [
                "sample",
                "--construction",
                "bidiagonal",
                "--beta",
                "0",
                "--n",
                "6",
                "--N",
                "4",
                "--samples",
                "5",
                "--seed",
                "1",
                "--out",
                str(tmp_path / "x"),
            ]
        )
        assert code == 2

    def test_multispike_and_sao(self, tmp_path):
        code = run_cli(
            [
                "sample",
                "--construction",
                "multispike",
                "--beta",
                "2",
                "--n",
                "5",
                "--N",
                "3",
                "--b",
                "1,2,3",
                "--samples",
                "10",
                "--seed",
                "3",
                "--out",
                str(tmp_path / "ms"),
            ]
        )
        assert code == 0
        code = run_cli(
            [
                "sample",
                "--construction",
                "sao",
                "--beta",
                "2",
                "--w",
                "0.0",
                "--h",
                "0.05",
                "--k",
                "2",
                "--samples",
                "4",
                "--seed",
                "9",
                "--out",
                str(tmp_path / "sao"),
            ]
        )
        assert code == 0
        data, cols = read_samples_csv(str(tmp_path / "sao") + ".csv")
        assert cols == ["eig1", "eig2"]
        assert data.shape == (4, 2)


class TestCurves:
    def test_tw_goe_monotone(self, tmp_path):
        out = tmp_path / "tw.csv"
        assert run_cli(["curves", "--curve", "tw-goe", "--s-min", "-6", "--s-max", "4", "--step", "0.05", "--out", str(out)]) == 0
        data, cols = read_samples_csv(str(out))
        assert cols == ["s", "cdf"]
        assert np.all(np.diff(data[:, 1]) >= -1e-12)

    def test_spiked_edge_w0_equals_tw_goe(self, tmp_path):
        tw = tmp_path / "tw.csv"
        sp = tmp_path / "sp.csv"
        common = ["--s-min", "-5", "--s-max", "3", "--step", "0.1"]
        assert run_cli(["curves", "--curve", "tw-goe", *common, "--out", str(tw)]) == 0
        assert run_cli(["curves", "--curve", "spiked-edge", "--w", "0", *common, "--out", str(sp)]) == 0
        a = read_samples_csv(str(tw))[0]
        b = read_samples_csv(str(sp))[0]
        assert np.max(np.abs(a[:, 1] - b[:, 1])) < 1e-10

    def test_density_blind_positive_w_rejected(self, tmp_path):
        code = run_cli(
            ["curves", "--curve", "density-blind", "--w", "1.0", "--s-min", "-2", "--s-max", "0", "--out", str(tmp_path / "x.csv")]
        )
        assert code == 2

    def test_painleve_table_export(self, tmp_path):
        out = tmp_path / "table.csv"
        assert run_cli(["curves", "--curve", "painleve-table", "--out", str(out)]) == 0
        data, cols = read_samples_csv(str(out))
        assert cols == ["s", "q", "q_prime", "E", "F"]
        assert data.shape[1] == 5

    def test_hyp1f1_curve(self, tmp_path):
        out = tmp_path / "h.csv"
        code = run_cli(
            [
                "curves",
                "--curve",
                "hyp1f1",
                "--beta",
                "2",
                "--N",
                "3",
                "--x",
                "1,2,3",
                "--c-min",
                "-0.5",
                "--c-max",
                "0.5",
                "--step",
                "0.25",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        data, _ = read_samples_csv(str(out))
        mid = data[np.argmin(np.abs(data[:, 0])), 1]
        assert mid == 1.0


class TestVerify:
    def test_unknown_suite_exits_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--suite", "nonsense", "--seed", "1"])
        assert err.value.code == 2

    def test_equivalence_small(self, tmp_path):
        out = tmp_path / "rep.json"
        code = run_cli(
            [
                "verify",
                "--suite",
                "equivalence",
                "--beta",
                "2",
                "--n",
                "6",
                "--N",
                "4",
                "--b",
                "1.5",
                "--samples",
                "1200",
                "--seed",
                "11",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        report = json.loads(Path(out).read_text())
        assert report["passed"] is True
        assert len(report["comparisons"]) == 15
