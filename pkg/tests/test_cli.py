"""CLI contract: exit codes, output files, determinism across threads."""

import json

import pytest

from sqlab.cli import DEFAULT_CONFIG, main

TINY = {
    "grid": {"points": 65},
    "ladder": {"levels": 4},
    "kernel": {"m": 33},
    "balls": {"levels": 5},
    "family": {"count": 3},
    "chain": {"base_radius": 0.125, "k_max": 3},
    "aperture": {"j_max": 2},
    "operators": ["s_alpha", "comm_s_alpha"],
    "refine": False,
}


def write_config(tmp_path, overrides, name="cfg.json"):
    cfg = dict(TINY)
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **val}
        else:
            cfg[key] = val
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(tmp_path, command, overrides=None, extra=(), name="out"):
    cfg = write_config(tmp_path, overrides or {})
    out = tmp_path / name
    rc = main([command, "--config", cfg, "--out", str(out), *extra])
    return rc, out


class TestConfigErrors:
    def test_missing_config_file(self, tmp_path, capsys):
        rc = main(["verify", "--config", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        rc = main(["verify", "--config", str(p), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_unknown_key(self, tmp_path, capsys):
        rc, _ = run(tmp_path, "verify", {"gridpoints": 65})
        assert rc == 2
        assert "unknown config keys" in capsys.readouterr().err

    def test_even_grid_points(self, tmp_path, capsys):
        rc, _ = run(tmp_path, "verify", {"grid": {"points": 64}})
        assert rc == 2

    def test_gstar_lambda_gate(self, tmp_path, capsys):
        rc, _ = run(tmp_path, "verify", {"gstar": {"lambda": 2.0}})
        assert rc == 2
        assert "lambda" in capsys.readouterr().err

    def test_bad_threads_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SQLAB_THREADS", "many")
        rc, _ = run(tmp_path, "weights")
        assert rc == 2
        assert "SQLAB_THREADS" in capsys.readouterr().err

    def test_unknown_sqfn_operator(self, tmp_path, capsys):
        rc, _ = run(tmp_path, "sqfn", {"sqfn": {"operator": "hilbert"}})
        assert rc == 2


class TestVerifyCommand:
    def test_pass_run_writes_reports(self, tmp_path, capsys):
        rc, out = run(tmp_path, "verify")
        assert rc == 0
        assert (out / "report.json").is_file()
        assert (out / "summary.csv").is_file()
        stdout = capsys.readouterr().out
        assert "PASS" in stdout and "FAIL" not in stdout
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["pass"] is True
        assert report["summary"]["total_suites"] == len(DEFAULT_CONFIG["suites"]) + 1

    def test_byte_identical_across_threads(self, tmp_path):
        rc1, out1 = run(tmp_path, "verify", extra=("--threads", "1"), name="o1")
        rc2, out2 = run(tmp_path, "verify", extra=("--threads", "3"), name="o2")
        assert rc1 == rc2 == 0
        for fname in ("report.json", "summary.csv"):
            assert (out1 / fname).read_bytes() == (out2 / fname).read_bytes()

    def test_serial_audit_reports_zero_mismatches(self, tmp_path, capsys):
        rc, _ = run(
            tmp_path,
            "verify",
            {"suites": ["bmo_growth", "subset_doubling"]},
            extra=("--threads", "2", "--serial-audit"),
        )
        assert rc == 0
        assert "serial audit: 0 mismatches" in capsys.readouterr().out

    def test_threads_env_is_honored(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SQLAB_THREADS", "2")
        rc, _ = run(tmp_path, "verify", {"suites": ["bmo_growth"]})
        assert rc == 0

    def test_unattainable_drift_bound_fails_with_exit_1(self, tmp_path, capsys):
        rc, out = run(
            tmp_path,
            "verify",
            {
                "suites": ["boundedness"],
                "operators": ["s_alpha"],
                "family": {"count": 2},
                "refine": True,
                "drift_bound": 1e-12,
            },
        )
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["pass"] is False


class TestDataCommands:
    def test_weights(self, tmp_path, capsys):
        rc, out = run(tmp_path, "weights")
        assert rc == 0
        data = json.loads((out / "weights.json").read_text())
        assert data["ap"]["supremum"] > 1.0 and not data["ap"]["overflow"]
        assert data["rh"]["constant"] >= 1.0
        assert data["admissible"] is True
        assert data["dual_weight"]["gamma"] == pytest.approx(-0.5)
        assert "A_p supremum" in capsys.readouterr().out

    def test_norms(self, tmp_path, capsys):
        rc, out = run(tmp_path, "norms")
        assert rc == 0
        data = json.loads((out / "norms.json").read_text())
        assert data["lebesgue"]["value"] > 0
        assert data["morrey"]["value"] > 0
        assert data["bmo_of_b"]["value"] > 0
        assert data["maximal_sup"] > 0

    def test_sqfn_writes_field_and_sidecar(self, tmp_path, capsys):
        rc, out = run(tmp_path, "sqfn")
        assert rc == 0
        assert (out / "sqfn_s_alpha.csv").is_file()
        sidecar = json.loads((out / "sqfn_s_alpha.json").read_text())
        assert sidecar["operator"] == "s_alpha_beta"
        assert "field max" in capsys.readouterr().out

    def test_sqfn_commutator(self, tmp_path):
        rc, out = run(tmp_path, "sqfn", {"sqfn": {"operator": "comm_g_alpha"}})
        assert rc == 0
        assert (out / "sqfn_comm_g_alpha.csv").is_file()

    def test_extremizer(self, tmp_path, capsys):
        rc, out = run(
            tmp_path,
            "extremizer",
            {"extremizer": {"points": [[0.0], [0.5]], "scales": [1.0]}},
        )
        assert rc == 0
        data = json.loads((out / "extremizer.json").read_text())
        assert len(data["entries"]) == 2
        assert (out / "extremizer_0.csv").is_file()
        assert (out / "extremizer_1.csv").is_file()
        for entry in data["entries"]:
            assert max(entry["residuals"].values()) <= 1e-9

    def test_defaults_only_weights_run(self, tmp_path):
        # no --config at all: every section falls back to defaults
        out = tmp_path / "o"
        rc = main(["weights", "--out", str(out)])
        assert rc == 0
        assert (out / "weights.json").is_file()
