import json

import pytest

from rellandau import cli


def run_cli(argv):
    return cli.main(argv)


class TestVerify:
    def test_passes(self, capsys):
        assert run_cli(["verify", "--pairs", "1500", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "FAIL" not in out

    def test_json_output(self, capsys):
        assert run_cli(["verify", "--pairs", "500", "--json"]) == 0
        records = json.loads(capsys.readouterr().out)
        assert all(r["passed"] for r in records)
        assert {"check", "residual", "tolerance", "passed"} <= set(records[0])

    def test_bad_pairs_is_usage_error(self):
        assert run_cli(["verify", "--pairs", "0"]) == 2


class TestConfig:
    def test_unknown_section(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"simulate": {}}))
        assert run_cli(["simulate", "--config", str(cfg)]) == 2

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sim": {"n_paritcles": 10}}))
        assert run_cli(["simulate", "--config", str(cfg)]) == 2

    def test_invalid_json(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert run_cli(["simulate", "--config", str(cfg)]) == 2

    def test_missing_file(self):
        assert run_cli(["simulate", "--config", "/nonexistent/cfg.json"]) == 2

    def test_invalid_sim_values(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"sim": {"n_particles": 8, "dt": 1e-3, "t_final": 0.01, "eps_reg": 0.0}})
        )
        assert run_cli(["simulate", "--config", str(cfg)]) == 2


class TestSimulate:
    def test_writes_trajectory(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "sim": {
                        "n_particles": 16,
                        "dt": 1e-3,
                        "t_final": 0.01,
                        "eps_reg": 1e-3,
                        "seed": 1,
                        "record_every": 5,
                    }
                }
            )
        )
        out = tmp_path / "out"
        assert run_cli(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0].startswith("t,mean_px")
        assert len(lines) == 4


class TestCouple:
    def test_writes_coupling(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "sim": {
                        "n_particles": 16,
                        "dt": 1e-3,
                        "t_final": 0.01,
                        "eps_reg": 1e-3,
                        "seed": 1,
                        "record_every": 5,
                    },
                    "couple": {"delta": 0.01},
                }
            )
        )
        out = tmp_path / "out"
        assert run_cli(["couple", "--config", str(cfg), "--out", str(out)]) == 0
        lines = (out / "coupling.csv").read_text().splitlines()
        assert lines[0] == "t,w2_sq,envelope,gamma_fitted"
        assert len(lines) == 4

    def test_zero_delta_gives_zero_w2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "sim": {
                        "n_particles": 16,
                        "dt": 1e-3,
                        "t_final": 0.01,
                        "eps_reg": 1e-3,
                        "seed": 1,
                        "record_every": 5,
                    },
                    "couple": {"delta": 0.0},
                }
            )
        )
        out = tmp_path / "out"
        assert run_cli(["couple", "--config", str(cfg), "--out", str(out)]) == 0
        rows = (out / "coupling.csv").read_text().splitlines()[1:]
        assert all(float(r.split(",")[1]) == 0.0 for r in rows)


class TestGronwall:
    def test_writes_series(self, tmp_path):
        code = run_cli(
            [
                "gronwall",
                "--rho0", "0.1",
                "--gamma-const", "1.0",
                "--T", "0.5",
                "--dt", "1e-3",
                "--out", str(tmp_path),
            ]
        )
        assert code == 0
        lines = (tmp_path / "gronwall.csv").read_text().splitlines()
        assert lines[0] == "t,rho"
        assert len(lines) == 502

    def test_bad_flags(self):
        assert run_cli(["gronwall", "--rho0", "-1", "--gamma-const", "1", "--T", "1"]) == 2


class TestSample:
    def test_writes_csv(self, tmp_path):
        assert run_cli(["sample", "--n", "50", "--seed", "2", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "sample.csv").read_text().splitlines()
        assert lines[0] == "px,py,pz"
        assert len(lines) == 51

    def test_bad_n(self):
        assert run_cli(["sample", "--n", "0"]) == 2

    def test_byte_identical_across_runs(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        run_cli(["sample", "--n", "1000", "--seed", "7", "--out", str(d1)])
        run_cli(["sample", "--n", "1000", "--seed", "7", "--out", str(d2)])
        assert (d1 / "sample.csv").read_bytes() == (d2 / "sample.csv").read_bytes()


class TestBounds:
    def test_writes_report(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"survey": {"bound_id": "lambda", "n": 500, "seed": 0}}))
        out = tmp_path / "out"
        assert run_cli(["bounds", "--config", str(cfg), "--out", str(out)]) == 0
        lines = (out / "bounds.csv").read_text().splitlines()
        assert lines[0] == "bound_id,n_samples,max_ratio,argmax"
        assert lines[1].startswith("lambda,500,")


class TestUsage:
    def test_unknown_subcommand(self):
        assert run_cli(["frobnicate"]) == 2

    def test_unknown_flag(self):
        assert run_cli(["verify", "--bogus"]) == 2
