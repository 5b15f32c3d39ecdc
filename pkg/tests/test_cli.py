"""CLI tests: output formats, exit codes, config round-trips, determinism."""

import json
import math

import pytest

from binceo.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def h_b(x):
    # independent oracle: direct base-2 binary entropy
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def conv(a, b):
    return a * (1 - b) + b * (1 - a)


class TestBound:
    def test_values_match_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "bound", "--p1", "0.15", "--p2", "0.15",
                               "--d1", "0.1", "--d2", "0.1")
        assert code == 0
        fields = dict(tok.split("=") for tok in out.split())
        p, d = conv(0.15, 0.15), conv(0.1, 0.1)
        assert float(fields["R1"]) == pytest.approx(h_b(conv(p, d)) - h_b(0.1), abs=1e-10)
        assert float(fields["R2"]) == pytest.approx(h_b(conv(p, d)) - h_b(0.1), abs=1e-10)
        assert float(fields["Rsum"]) == pytest.approx(
            1 + h_b(conv(p, d)) - 2 * h_b(0.1), abs=1e-10)
        q = conv(0.15, 0.1)
        assert float(fields["D"]) == pytest.approx(
            2 * h_b(q) - h_b(conv(p, d)), abs=1e-10)

    def test_invalid_d_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "bound", "--p1", "0.15", "--p2", "0.15",
                               "--d1", "0.7", "--d2", "0.1")
        assert code == 1
        assert "error:" in err

    def test_missing_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bound", "--p1", "0.15"])
        assert exc.value.code == 2

    def test_help_exits_0(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0


class TestMuMax:
    def test_positive_scalar(self, capsys):
        code, out, _ = run_cli(capsys, "mu-max", "--p1", "0.15", "--p2", "0.15")
        assert code == 0
        assert float(out.strip()) > 0.0


class TestCurve:
    def test_csv_shape_and_monotonicity(self, capsys, tmp_path):
        out_path = tmp_path / "curve.csv"
        code, _, _ = run_cli(capsys, "curve", "--p1", "0.15", "--p2", "0.15",
                             "--mu-steps", "6", "--coarse-step", "0.01",
                             "--refine-step", "0.002", "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "mu,d1,d2,R1,R2,Rsum,D,F"
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        assert len(rows) == 6
        # mu = 0: rate is free (objective F = D + mu * Rsum), so d* = (0, 0)
        p = conv(0.15, 0.15)
        assert rows[0][5] == pytest.approx(1.0 + h_b(p), abs=1e-9)
        assert rows[0][6] == pytest.approx(2 * h_b(0.15) - h_b(p), abs=1e-9)
        rsum = [r[5] for r in rows]
        dist = [r[6] for r in rows]
        assert all(a >= b - 1e-9 for a, b in zip(rsum, rsum[1:]))
        assert all(a <= b + 1e-9 for a, b in zip(dist, dist[1:]))

    def test_stdout_default(self, capsys):
        code, out, _ = run_cli(capsys, "curve", "--p1", "0.2", "--p2", "0.2",
                               "--mu-steps", "2", "--coarse-step", "0.02",
                               "--refine-step", "0.005")
        assert code == 0
        assert out.startswith("mu,d1,d2,")


class TestRegions:
    def test_emits_rows_and_thresholds(self, capsys, tmp_path):
        out_path = tmp_path / "regions.csv"
        code, out, _ = run_cli(capsys, "regions", "--p1", "0.15", "--p2", "0.15",
                               "--steps", "8", "--out", str(out_path))
        assert code == 0
        assert out.startswith("thresholds:")
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "mu,d1,d2,F,region"
        assert len(lines) == 9


class TestDesign:
    def test_corner_plan(self, capsys):
        code, out, _ = run_cli(
            capsys, "design", "--p1", "0.15", "--p2", "0.15",
            "--d1", "0.1", "--d2", "0.1", "--n", "10000", "--point", "corner",
            "--eps11", "0.00894559", "--eps12", "0.0021",
            "--eps21", "0.00894559", "--eps22", "0.0",
        )
        assert code == 0
        assert "m1=5400 k1=4700 m2=5400 k2=5400" in out

    def test_single_point_explains_rule(self, capsys):
        code, _, err = run_cli(capsys, "design", "--p1", "0.15", "--p2", "0.15",
                               "--d1", "0.1", "--d2", "0.5", "--n", "1000",
                               "--point", "single")
        assert code == 1
        assert "single-link" in err

    def test_intermediate_requires_delta(self, capsys):
        code, _, err = run_cli(capsys, "design", "--p1", "0.15", "--p2", "0.15",
                               "--d1", "0.1", "--d2", "0.1", "--n", "1000",
                               "--point", "intermediate")
        assert code == 1
        assert "delta" in err


class TestQuantize:
    def test_runs_and_reports(self, capsys):
        code, out, _ = run_cli(capsys, "quantize", "--n", "200", "--m", "120",
                               "--degree", "3", "--blocks", "2")
        assert code == 0
        assert out.count("block=") == 2
        mean = float(out.strip().split("\n")[-1].split()[0].split("=")[1])
        assert 0.0 <= mean <= 0.5


class TestSimulate:
    CONFIG = "configs/smoke_singlelink_n500.json"

    def test_smoke_config(self, capsys, tmp_path):
        rpt = tmp_path / "report.json"
        csv = tmp_path / "runs.csv"
        code, out, _ = run_cli(capsys, "simulate", "--config", self.CONFIG,
                               "--out", str(rpt), "--csv", str(csv))
        assert code == 0
        assert out.startswith("Rsum=") and "gap=" in out
        report = json.loads(rpt.read_text())
        assert report["plan"]["m1"] == report["plan"]["k1"]
        assert "wall_clock_seconds" not in report
        lines = csv.read_text().strip().split("\n")
        assert lines[0] == "run,seed,d11,d21,d12,d22,Dem,converged1,converged2"
        assert len(lines) == 1 + report["config"]["runs"]

    def test_deterministic_outputs(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        ca, cb = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(capsys, "simulate", "--config", self.CONFIG,
                       "--out", str(a), "--csv", str(ca))[0] == 0
        assert run_cli(capsys, "simulate", "--config", self.CONFIG,
                       "--out", str(b), "--csv", str(cb))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert ca.read_bytes() == cb.read_bytes()

    def test_missing_config_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--config", "no_such.json")
        assert code == 1
        assert "error:" in err

    def test_unknown_key_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        cfg = json.loads(open(self.CONFIG).read())
        cfg["typo_key"] = 1
        bad.write_text(json.dumps(cfg))
        code, _, err = run_cli(capsys, "simulate", "--config", str(bad))
        assert code == 1
        assert "typo_key" in err


class TestSanity:
    def test_small_gap_to_bound(self, capsys):
        code, out, _ = run_cli(capsys, "sanity", "--p1", "0.15", "--p2", "0.15",
                               "--d1", "0.1", "--d2", "0.1", "--n", "50000")
        assert code == 0
        fields = dict(tok.split("=") for tok in out.split())
        assert abs(float(fields["diff"])) <= 0.01
