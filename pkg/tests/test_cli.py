import json
from pathlib import Path

import pytest

import degseq.cli as cli
from degseq.acceptance import CriterionResult
from degseq.io import read_degree_file


def run(args):
    return cli.main(args)


def read_meta(out):
    return json.loads((Path(out) / "metadata.json").read_text())


class TestOracleCommand:
    def test_writes_family_and_marginals(self, tmp_path):
        out = tmp_path / "o"
        assert run(["oracle", "--degrees", "regular(4,2)", "--out", str(out)]) == 0
        meta = read_meta(out)
        assert meta["family_size"] == 3
        lines = (out / "marginals.csv").read_text().splitlines()
        assert lines[0] == "i,j,value"
        values = {tuple(line.split(",")[:2]): float(line.split(",")[2]) for line in lines[1:]}
        assert values[("0", "1")] == pytest.approx(2 / 3)

    def test_cap_exit_code(self, tmp_path):
        code = run(["oracle", "--degrees", "regular(12,3)", "--out", str(tmp_path / "x")])
        assert code == 3


class TestDegreeResolution:
    def test_non_graphical_file_exits_2(self, tmp_path):
        deg = tmp_path / "d.txt"
        deg.write_text("3\n3\n1\n1\n")
        code = run(["sample-gnd", "--degrees", str(deg), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_degree_file_written(self, tmp_path):
        out = tmp_path / "o"
        assert run(["sample-gnd", "--degrees", "regular(5,2)", "--out", str(out), "--runs", "2"]) == 0
        assert read_degree_file(out / "degrees.txt").degrees == (2,) * 5


class TestSampleGnd:
    def test_exact_mode_with_checkpoints(self, tmp_path):
        out = tmp_path / "o"
        code = run([
            "sample-gnd", "--degrees", "regular(4,2)", "--mode", "exact",
            "--runs", "50", "--checkpoints", "1,2", "--seed", "5",
            "--out", str(out), "--save-graphs",
        ])
        assert code == 0
        assert (out / "run_00000.edges").exists()
        assert (out / "concentration.json").exists()
        meta = read_meta(out)
        assert meta["checkpoints"] == [1, 2]


class TestSampleGnw:
    def test_marginal_report_written(self, tmp_path):
        out = tmp_path / "o"
        code = run([
            "sample-gnw", "--degrees", "regular(6,3)", "--runs", "200",
            "--seed", "9", "--out", str(out), "--w-kind", "p",
        ])
        assert code == 0
        assert (out / "w_matrix.csv").exists()
        assert (out / "marginals.csv").exists()
        assert "worst_abs_z" in read_meta(out)


class TestSeqApproxP:
    def test_runs_with_schedule(self, tmp_path):
        out = tmp_path / "o"
        code = run([
            "seq-approx-p", "--degrees", "regular(6,3)", "--runs", "200",
            "--seed", "2", "--out", str(out), "--zeta", "0.2", "--zeta-prime", "0.2",
        ])
        assert code == 0
        meta = read_meta(out)
        assert meta["zeta"] == 0.2
        assert (out / "marginals.csv").exists()


class TestCouple:
    def test_traces_and_metadata(self, tmp_path):
        out = tmp_path / "o"
        code = run([
            "couple", "--degrees", "regular(6,2)", "--runs", "10", "--seed", "4",
            "--mode", "exact", "--denom", "exact-max", "--out", str(out),
        ])
        assert code == 0
        meta = read_meta(out)
        assert 0.0 <= meta["fallback_fraction"] <= 1.0
        assert meta["containment_violations"] == 0
        lines = (out / "traces.ndjson").read_text().splitlines()
        assert len(lines) == 10
        record = json.loads(lines[0])
        assert {"fallback", "poisson_steps", "eta_min"} <= set(record)

    def test_deterministic_outputs(self, tmp_path):
        args = lambda out: [
            "couple", "--degrees", "regular(6,2)", "--runs", "5", "--seed", "11",
            "--mode", "asymptotic", "--denom", "certified-bound", "--out", out,
        ]
        assert run(args(str(tmp_path / "a"))) == 0
        assert run(args(str(tmp_path / "b"))) == 0
        for name in ["traces.ndjson", "degrees.txt"]:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        ma = read_meta(tmp_path / "a")
        mb = read_meta(tmp_path / "b")
        ma.pop("wall_time_s")
        mb.pop("wall_time_s")
        assert ma == mb


class TestConfigFile:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"degrees": "regular(6,2)", "runs": 3, "seed": 1}))
        out = tmp_path / "o"
        code = run([
            "couple", "--config", str(cfg), "--runs", "4", "--out", str(out),
            "--mode", "exact", "--denom", "exact-max",
        ])
        assert code == 0
        assert read_meta(out)["runs"] == 4

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"degrees": "regular(6,2)", "bogus": 1}))
        code = run(["couple", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == 1


class TestVerifySuite:
    def test_exit_code_5_on_failure(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            cli,
            "run_battery",
            lambda: [CriterionResult("stub", False, 0.0, "forced failure")],
        )
        code = run(["verify-suite", "--out", str(tmp_path / "v")])
        assert code == 5
        report = json.loads((tmp_path / "v" / "acceptance_report.json").read_text())
        assert report[0]["passed"] is False

    def test_exit_code_0_on_pass(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            cli,
            "run_battery",
            lambda: [CriterionResult("stub", True, 0.0, "ok")],
        )
        assert run(["verify-suite", "--out", str(tmp_path / "v")]) == 0
