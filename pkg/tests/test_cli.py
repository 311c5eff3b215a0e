"""Command-line entry points: JSON output, file IO, and exit codes."""

import csv
import io
import json
import subprocess
import sys

import pytest

from satlab.cli import main
from satlab.formulas import CnfFormula, Literal, clause, write_dimacs


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, json.loads(out)


def single_output(payload):
    """Analytic reports expose one named value under "outputs"."""
    (value,) = payload["outputs"].values()
    return value


def test_module_is_executable():
    res = subprocess.run(
        [sys.executable, "-m", "satlab", "analytic", "contradiction-line",
         "--param", "p=0.5"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    (value,) = json.loads(res.stdout)["outputs"].values()
    assert value == pytest.approx(2.0)


class TestAnalytic:
    def test_cover_probability(self, capsys):
        code, out = run_cli(
            ["analytic", "cover-probability", "--param", "N=2", "--param", "M=5"],
            capsys,
        )
        assert code == 0
        assert single_output(out) == pytest.approx(5 / 16)

    def test_units_conversion(self, capsys):
        _, nats = run_cli(
            ["analytic", "annealed-exponent", "--param", "alpha=0.5"], capsys
        )
        _, bits = run_cli(
            ["analytic", "annealed-exponent", "--param", "alpha=0.5",
             "--units", "ln2"], capsys
        )
        assert single_output(bits) == pytest.approx(
            single_output(nats) / 0.6931471805599453
        )

    def test_uc_success(self, capsys):
        code, out = run_cli(
            ["analytic", "p-success-uc", "--param", "alpha=2.0"], capsys
        )
        assert code == 0
        assert 0.5 < single_output(out) < 0.7


class TestWalk:
    def test_solves_and_writes_trajectory(self, capsys, tmp_path):
        traj = tmp_path / "tr.csv"
        code, out = run_cli(
            ["walk", "--solver", "prwsat", "--n", "100", "--alpha", "2.0",
             "--seed", "3", "--t-max", "100000", "--trajectory", str(traj)],
            capsys,
        )
        assert code == 0
        assert out["status"] == "solution"
        with open(traj, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert set(rows[0]) == {"T", "t", "E", "phi"}
        assert len(rows) >= 1

    def test_reads_dimacs_instance(self, capsys, tmp_path):
        f = CnfFormula(2, (clause(Literal(0, 1), Literal(1, 1)),))
        path = tmp_path / "f.cnf"
        with open(path, "w") as fh:
            write_dimacs(f, fh)
        code, out = run_cli(
            ["walk", "--solver", "prwsat", "--dimacs", str(path), "--t-max",
             "100"], capsys,
        )
        assert code == 0
        assert out["status"] == "solution"


class TestDpll:
    def test_complete_verdicts(self, capsys):
        code, out = run_cli(
            ["dpll", "--complete", "--n", "40", "--alpha", "2.0", "--samples",
             "3", "--seed", "1"], capsys,
        )
        assert code == 0
        assert len(out["results"]) == 3
        assert all(
            r["outcome"] in ("SAT", "UNSAT", "budget") for r in out["results"]
        )

    def test_no_backtrack_trajectory(self, capsys, tmp_path):
        traj = tmp_path / "plane.csv"
        code, out = run_cli(
            ["dpll", "--heuristic", "guc", "--n", "300", "--alpha", "2.5",
             "--trajectory", str(traj)], capsys,
        )
        assert code == 0
        assert isinstance(out["results"][0]["success"], bool)
        with open(traj, newline="") as fh:
            header = next(csv.reader(fh))
        assert header == ["t", "p", "alpha"]


class TestXorsat:
    def test_core_and_entropy(self, capsys):
        code, core = run_cli(
            ["xorsat", "core", "--n", "200", "--alpha", "0.9", "--seed", "2"],
            capsys,
        )
        assert code == 0
        assert core["core_equations"] >= 0
        code, ent = run_cli(
            ["xorsat", "entropy", "--n", "200", "--alpha", "0.5", "--seed", "2",
             "--units", "ln2"], capsys,
        )
        assert code == 0
        assert ent["s"] == pytest.approx(ent["sigma"] + ent["s_int"], abs=1e-9)

    def test_overlaps(self, capsys):
        code, out = run_cli(
            ["xorsat", "overlaps", "--n", "150", "--alpha", "0.88", "--seed",
             "4", "--samples", "20"], capsys,
        )
        assert code == 0
        assert -1.0 <= out["inter_mean"] <= out["intra_mean"] <= 1.0


class TestMp:
    def test_bp_marginals_file(self, capsys, tmp_path):
        marg = tmp_path / "m.csv"
        code, out = run_cli(
            ["mp", "--guide", "bp", "--n", "100", "--alpha", "2.0", "--seed",
             "5", "--marginals", str(marg)], capsys,
        )
        assert code == 0
        assert out["converged"]
        with open(marg, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 100

    def test_decimation(self, capsys):
        code, out = run_cli(
            ["mp", "--guide", "sp", "--decimate", "--n", "400", "--alpha",
             "3.5", "--seed", "6", "--damping", "0.0", "--epsilon", "1e-3"],
            capsys,
        )
        assert code == 0
        assert out["status"] == "SAT"
        assert out["variables_fixed"] >= 0


class TestPopulation:
    def test_rs_with_histogram(self, capsys, tmp_path):
        hist = tmp_path / "h.csv"
        code, out = run_cli(
            ["population", "rs", "--alpha", "1.0", "--pop-size", "5000",
             "--sweeps", "40", "--hist", str(hist)], capsys,
        )
        assert code == 0
        assert out["s_rs"] == pytest.approx(0.5597, abs=0.02)
        assert hist.exists()


class TestExperimentAndFss:
    def test_experiment_round_trip_with_fss(self, capsys, tmp_path):
        cfg = {
            "decider": "gf2_solve",
            "ensemble": "xorsat",
            "k": 3,
            "n_list": [60, 120, 240],
            "alphas": [0.7, 0.8, 0.85, 0.9, 0.95, 1.0, 1.1],
            "samples": 60,
            "seed": 9,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out_dir = tmp_path / "exp"
        code, out = run_cli(
            ["experiment", "--config", str(cfg_path), "--out", str(out_dir),
             "--fss"], capsys,
        )
        assert code == 0
        assert (out_dir / "results.csv").exists()
        assert (out_dir / "curve.csv").exists()
        assert 0.8 < out["fss"]["alpha_c"] < 1.05
        # the standalone fit over the written curve agrees
        code, refit = run_cli(
            ["fss", "--curve", str(out_dir / "curve.csv")], capsys
        )
        assert code == 0
        assert refit["alpha_c"] == pytest.approx(out["fss"]["alpha_c"], abs=1e-9)

    def test_set_overrides(self, capsys, tmp_path):
        cfg = {
            "decider": "gf2_solve", "ensemble": "xorsat", "k": 3,
            "n_list": [30], "alphas": [0.5], "samples": 2, "seed": 0,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code, out = run_cli(
            ["experiment", "--config", str(cfg_path), "--out",
             str(tmp_path / "o"), "--set", "samples=4"], capsys,
        )
        assert code == 0
        assert all(pt["trials"] == 4 for pt in out["points"])
