import json
import math
import subprocess
import sys


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "kinkstab", *args], cwd=cwd, capture_output=True, text=True
    )


class TestProfileCommand:
    def test_rows_and_middle_value(self, tmp_path):
        out = tmp_path / "prof.csv"
        res = run_cli(
            ["profile", "--p", "2", "--q", "4", "--x-min", "-10", "--x-max", "10", "--n", "100",
             "--out", str(out)], tmp_path,
        )
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,phi,phi_prime,one_minus_phi_sq"
        assert len(lines) == 102  # header + 101 nodes
        middle = lines[51].split(",")
        assert float(middle[0]) == 0.0
        assert math.isclose(float(middle[1]), 0.70710678, abs_tol=1e-8)

    def test_meta_sidecar(self, tmp_path):
        out = tmp_path / "prof.csv"
        run_cli(["profile", "--n", "100", "--out", str(out)], tmp_path)
        meta = json.loads((tmp_path / "prof.csv.meta.json").read_text())
        assert meta["version"]
        assert meta["command"] == "profile"


class TestCriterionScanCommand:
    def test_row_count_and_signs(self, tmp_path):
        out = tmp_path / "scan.csv"
        res = run_cli(
            ["--threads", "2", "criterion-scan", "--r-min", "-6", "--r-max", "6",
             "--r-step", "0.25", "--n", "2000", "--out", str(out)], tmp_path,
        )
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "R,z_R,lambda1,lambda2,lambda3,F0,product"
        assert len(lines) == 50  # header + 49 rows
        for line in lines[1:]:
            fields = [float(v) for v in line.split(",")]
            assert fields[2] < 0.0  # lambda1
            assert fields[5] < 0.0  # F0

    def test_determinism(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["criterion-scan", "--r-min", "-1", "--r-max", "1", "--r-step", "0.5",
                "--n", "2000"]
        run_cli([*args, "--out", str(a)], tmp_path)
        run_cli(["--threads", "3", *args, "--out", str(b)], tmp_path)
        assert a.read_bytes() == b.read_bytes()


class TestSpectrumCommand:
    def test_eigenfunction_schema(self, tmp_path):
        out = tmp_path / "eig.csv"
        res = run_cli(["spectrum", "--r", "0.2", "--n", "2000", "--out", str(out)], tmp_path)
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "z,x,v1,v2,v3"
        last = lines[-1].split(",")
        assert float(last[0]) == 0.0
        assert math.isinf(float(last[1]))  # z = 0 maps to x = +inf
        meta = json.loads((tmp_path / "eig.csv.meta.json").read_text())
        assert meta["eigenvalues"][0] < 0.0


class TestEvolveCommand:
    def test_schema_and_determinism(self, tmp_path):
        args = ["evolve", "--delta", "0.02", "--t-final", "0.5", "--dt", "0.01",
                "--x-min", "-20", "--x-max", "20", "--n", "1024"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        res = run_cli([*args, "--out", str(a)], tmp_path)
        assert res.returncode == 0
        run_cli([*args, "--out", str(b)], tmp_path)
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().splitlines()
        assert lines[0] == "t,energy,rho_modulated,alpha,beta,eta_sup"
        meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
        assert meta["verdict_max_ratio"] > 0.0


class TestBlockSpectrumCommand:
    def test_schema(self, tmp_path):
        out = tmp_path / "block.csv"
        res = run_cli(
            ["block-spectrum", "--x-min", "-20", "--x-max", "20", "--n", "1600",
             "--out", str(out)], tmp_path,
        )
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "re,im"
        assert all(float(line.split(",")[0]) == 0.0 for line in lines[1:])
        meta = json.loads((tmp_path / "block.csv.meta.json").read_text())
        assert meta["kernel_mu_count"] == 1


class TestDecomposeCheckCommand:
    def test_runs_and_reports(self, tmp_path):
        out = tmp_path / "dec.csv"
        res = run_cli(
            ["decompose-check", "--seeds", "3", "--n", "4096", "--out", str(out)], tmp_path,
        )
        assert res.returncode == 0
        meta = json.loads((tmp_path / "dec.csv.meta.json").read_text())
        assert meta["worst_rel_mismatch"] < 1e-9


class TestExitCodes:
    def test_validation_error_is_2(self, tmp_path):
        res = run_cli(["criterion-scan", "--n", "4", "--out", str(tmp_path / "x.csv")], tmp_path)
        assert res.returncode == 2
        assert "validation" in res.stderr

    def test_numerical_failure_is_3(self, tmp_path):
        # R = -1 has no resolvent root below the band edge
        res = run_cli(
            ["constrained-eigenvalue", "--r", "-1", "--n", "2000", "--out", str(tmp_path / "x.csv")],
            tmp_path,
        )
        assert res.returncode == 3
        assert "numerical" in res.stderr

    def test_failed_scan_rows_exit_3(self, tmp_path):
        out = tmp_path / "scan.csv"
        res = run_cli(
            ["criterion-scan", "--r", "-12", "--n", "2000", "--out", str(out)], tmp_path,
        )
        assert res.returncode == 3
        assert out.exists()


class TestConfigFile:
    def test_config_defaults_and_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"r": 0.2, "n": 1000, "out": "ignored.csv"}))
        out = tmp_path / "eig.csv"
        res = run_cli(
            ["--config", str(cfg), "spectrum", "--out", str(out)], tmp_path,
        )
        assert res.returncode == 0
        meta = json.loads((tmp_path / "eig.csv.meta.json").read_text())
        assert meta["R"] == 0.2
        assert meta["n"] == 1000
