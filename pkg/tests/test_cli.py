"""CLI: exit-code protocol, file schemas, determinism, config handling."""

import json
from pathlib import Path

import pytest

from oscdecay.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "sample_phases"


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture
def outdir(tmp_path):
    return tmp_path / "out"


class TestAnalyze:
    def test_axes_phase_reports(self, outdir):
        code = run("analyze", "--phase", SAMPLES / "x5_y4_x4y.json", "--out", outdir)
        assert code == 0
        poly = json.loads((outdir / "polyhedron.json").read_text())
        assert poly["newton_distance"] == "20/9"
        assert poly["facet_normals"] == [["1/5", "1/4"]]
        ladder = json.loads((outdir / "ladder.json").read_text())
        assert ladder["terms"][0]["p"] == "9/20"
        assert ladder["terms"][0]["d"] == 1
        nd = json.loads((outdir / "nondegeneracy.json").read_text())
        assert nd["status"] == "Nondegenerate"

    def test_degenerate_exit_code_and_witness(self, outdir):
        code = run("analyze", "--phase", SAMPLES / "x_minus_y_squared.json", "--out", outdir)
        assert code == 2
        nd = json.loads((outdir / "nondegeneracy.json").read_text())
        witnesses = [f["witness"] for f in nd["faces"] if f["witness"]]
        assert witnesses

    def test_parse_error_exit(self, outdir, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dimension": 1, "terms": [{"exponents": [0], "coefficient": 1}]}')
        assert run("analyze", "--phase", bad, "--out", outdir) == 1
        missing = tmp_path / "missing.json"
        assert run("analyze", "--phase", missing, "--out", outdir) == 1

    def test_meta_embedded_everywhere(self, outdir):
        run("analyze", "--phase", SAMPLES / "x2.json", "--out", outdir, "--seed", "7")
        for name in ("polyhedron.json", "ladder.json", "nondegeneracy.json"):
            meta = json.loads((outdir / name).read_text())["meta"]
            assert meta["seed"] == 7
            assert meta["version"]
            assert len(meta["config_hash"]) == 16


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("analyze", "--phase", SAMPLES / "x5_y4_x4y.json", "--out", out) == 0
            assert run("bounds", "--phase", SAMPLES / "x2.json", "--out", out) == 0
        for name in ("polyhedron.json", "ladder.json", "nondegeneracy.json",
                     "constants.json", "lemma1.csv", "boundsum.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestVerifyDecay:
    def test_short_sweep_passes_x2(self, outdir):
        code = run(
            "verify-decay", "--phase", SAMPLES / "x2.json", "--out", outdir,
            "--lambda-min", "100", "--lambda-max", "100000", "--points", "19",
        )
        assert code == 0
        report = json.loads((outdir / "fit_report.json").read_text())
        assert report["pass"] is True
        assert report["theoretical"]["p"] == "1/2"
        sweep = (outdir / "sweep.csv").read_text().splitlines()
        assert sweep[1] == "lambda,re,im,abs,est_error,flagged"
        assert len(sweep) == 21  # comment + header + 19 rows

    def test_degenerate_gate(self, outdir):
        code = run("verify-decay", "--phase", SAMPLES / "x_minus_y_squared.json", "--out", outdir)
        assert code == 2

    def test_config_file_overrides(self, outdir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "lambda": {"min": 100.0, "max": 100000.0, "points": 19},
            "cutoff": {"radius": 0.4, "kind": "bump"},
        }))
        code = run("verify-decay", "--phase", SAMPLES / "x3.json", "--out", outdir,
                   "--config", cfg)
        assert code == 0
        report = json.loads((outdir / "fit_report.json").read_text())
        assert report["theoretical"]["p"] == "1/3"


class TestBounds:
    def test_constants_and_tables(self, outdir):
        assert run("bounds", "--phase", SAMPLES / "x2.json", "--out", outdir) == 0
        constants = json.loads((outdir / "constants.json").read_text())
        assert constants["s"] == pytest.approx(1 / 2048, rel=1e-9)
        lemma = (outdir / "lemma1.csv").read_text().splitlines()
        assert lemma[1] == "j,epsilon,box_min,envelope,ratio"
        sums = (outdir / "boundsum.csv").read_text().splitlines()
        assert sums[1] == "lambda,sum,normalized"

    def test_degenerate_exit(self, outdir):
        assert run("bounds", "--phase", SAMPLES / "x_minus_y_squared.json", "--out", outdir) == 2


class TestBoxCheck:
    def test_table_written(self, outdir):
        assert run("box-check", "--phase", SAMPLES / "x2.json", "--out", outdir) == 0
        lines = (outdir / "boxcheck.csv").read_text().splitlines()
        assert lines[1] == "lambda,j,value,bound,ratio,reliable"
        assert len(lines) > 10


class TestConfigIsolation:
    def test_flag_overrides_do_not_leak_between_runs(self, tmp_path):
        from oscdecay.cli import DEFAULT_CONFIG

        before = json.dumps(DEFAULT_CONFIG, sort_keys=True)
        run(
            "verify-decay", "--phase", SAMPLES / "x2.json", "--out", tmp_path / "v",
            "--lambda-min", "200", "--lambda-max", "50000", "--points", "19",
            "--radius", "0.4",
        )
        assert json.dumps(DEFAULT_CONFIG, sort_keys=True) == before


class TestLadderCommand:
    def test_non_convenient_gets_default_bound(self, outdir):
        code = run("ladder", "--phase", SAMPLES / "x2y2_xy3_minus_x4y5.json", "--out", outdir)
        assert code == 0
        ladder = json.loads((outdir / "ladder.json").read_text())
        assert ladder["terms"][0]["p"] == "1/2"
        assert ladder["terms"][0]["d"] == 2
        assert ladder["beta_bound"] == [8, 8]
