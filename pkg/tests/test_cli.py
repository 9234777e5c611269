"""Config parsing, experiment commands, exit codes, CSV contracts."""
import csv
import math

import pytest

import collapselab as cl
from collapselab.cli import main
from collapselab.config import ConfigError, parse_config_text


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
        footer = dict(
            line[1:].strip().split("=", 1)
            for line in open(path)
            if line.startswith("#") and "=" in line
        )
    parsed = list(csv.reader(rows))
    return parsed[0], parsed[1:], footer


class TestConfigParsing:
    def test_basic(self):
        cfg = parse_config_text("mode = certify2d\nmass_m = 50\n# comment\nn=128\n")
        assert cfg.mode == "certify2d"
        assert cfg.get_float("mass_m") == 50.0
        assert cfg.n == 128

    def test_inline_comment(self):
        cfg = parse_config_text("mode=sweep\nmass_lo = 10  # lower end\n")
        assert cfg.get_float("mass_lo") == 10.0

    def test_missing_mode(self):
        with pytest.raises(ConfigError):
            parse_config_text("mass_m = 50\n")

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            parse_config_text("mode = explode\n")

    def test_bad_line(self):
        with pytest.raises(ConfigError):
            parse_config_text("mode = sweep\nnonsense line\n")

    def test_grid_floor(self):
        cfg = parse_config_text("mode = certify2d\nn = 32\n")
        with pytest.raises(ConfigError):
            _ = cfg.n


class TestCertifyCommand:
    def test_certify_2d_passes(self, tmp_path):
        cfg = write_config(tmp_path, "mode = certify2d\nmass_m = 50.265482457436692\nn = 128\n")
        assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0
        header, rows, footer = read_csv(tmp_path / "certificate.csv")
        assert header == ["check_name", "max_residual_or_slack", "grid_n", "verdict"]
        assert rows[-1][0] == "overall" and rows[-1][3] == "pass"
        assert (tmp_path / "certificate_field.csv").exists()
        assert (tmp_path / "certificate_summary.txt").exists()

    def test_certify_4d_passes(self, tmp_path):
        cfg = write_config(
            tmp_path, "mode = certify4d\ndelta = 1\nkappa = 1\nmass_m = 700\nn = 128\n")
        assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0

    def test_certify_4d_subcritical_mass_exits_2(self, tmp_path):
        cfg = write_config(
            tmp_path, "mode = certify4d\ndelta = 1\nkappa = 1\nmass_m = 600\nn = 128\n")
        assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_malformed_config_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "mode = certify4d\nmass_m = seven hundred\n")
        assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["certify", "--config", str(tmp_path / "nope.cfg"),
                     "--out", str(tmp_path)]) == 2


class TestSimulateCommand:
    def test_subcritical_2d(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = simulate2d\nprofile = bump\nmass_m = 20\n"
            "n = 128\nt_end = 0.5\nsnapshot_interval = 0.1\n"))
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
        header, rows, footer = read_csv(tmp_path / "trajectory.csv")
        assert header == ["t", "s", "U", "W", "u_reconstructed", "w_reconstructed"]
        assert footer["termination"] == "reached t_end"
        aheader, arows, _ = read_csv(tmp_path / "audit.csv")
        assert aheader[0] == "t" and aheader[1] == "u_mass_drift"
        assert all(r[2] == "pass" for r in arows)

    def test_certified_2d_blowup(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = simulate2d\nprofile = certified\nmass_m = 50.265482457436692\n"
            "n = 256\nt_end = 1.2\nsnapshot_interval = 0.1\n"))
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
        _, _, footer = read_csv(tmp_path / "trajectory.csv")
        assert footer["termination"] == "blowup detected"
        assert float(footer["t_final"]) <= 1.0
        cheader, crows, cfooter = read_csv(tmp_path / "comparison.csv")
        assert cheader == ["t", "max_violation"]
        assert float(cfooter["max_violation"]) <= 1e-5

    def test_random_profile_deterministic(self, tmp_path):
        text = ("mode = simulate4d\nprofile = random\nmass_m = 100\nseed = 3\n"
                "n = 128\nt_end = 0.1\nsnapshot_interval = 0.05\n")
        cfg = write_config(tmp_path, text)
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()


class TestSweepCommand:
    def test_small_sweep_and_determinism(self, tmp_path):
        crit = cl.CRITICAL_MASS_2D
        text = (f"mode = sweep\ndimension = 2\nmass_lo = {0.5 * crit}\n"
                f"mass_hi = {2.0 * crit}\nn = 128\nt_end = 2.0\n"
                "max_bisections = 3\nmax_steps = 200000\n")
        cfg = write_config(tmp_path, text)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["sweep", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
        header, rows, footer = read_csv(out1 / "sweep.csv")
        assert header == ["probe", "mass", "verdict", "t_final"]
        assert float(footer["bounded_max"]) < float(footer["blowup_min"])
        est = float(footer["estimate"])
        assert float(footer["bounded_max"]) <= est <= float(footer["blowup_min"])

    def test_degenerate_bracket_exits_4(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = sweep\ndimension = 2\nmass_lo = 30\nmass_hi = 30\n"
            "n = 128\nt_end = 1.0\n"))
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 4

    def test_non_straddling_bracket_exits_4(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = sweep\ndimension = 2\nmass_lo = 5\nmass_hi = 10\n"
            "n = 128\nt_end = 1.0\nmax_bisections = 2\n"))
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 4


class TestCollapseCommand:
    def test_collapse_on_blowup(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = collapse\ndimension = 2\nprofile = certified\n"
            "mass_m = 50.265482457436692\nn = 256\nt_end = 1.2\n"
            "snapshot_interval = 0.1\n"))
        assert main(["collapse", "--config", cfg, "--out", str(tmp_path)]) == 0
        header, rows, footer = read_csv(tmp_path / "collapse.csv")
        assert header == ["r", "mass_in_ball", "outer_density"]
        xi = [float(r[1]) for r in rows]
        assert xi == sorted(xi)
        assert xi[-1] == pytest.approx(50.265482457436692, rel=1e-9)
        assert 0.0 < float(footer["m_star"]) <= 50.266

    def test_collapse_on_bounded_exits_5(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = collapse\ndimension = 2\nprofile = bump\nmass_m = 20\n"
            "n = 128\nt_end = 0.3\nsnapshot_interval = 0.1\n"))
        assert main(["collapse", "--config", cfg, "--out", str(tmp_path)]) == 5


class TestEnergyCommand:
    def test_energy_on_subcritical(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = energy\ndimension = 4\nprofile = bump\nmass_m = 505\n"
            "n = 128\nt_end = 0.3\nsnapshot_interval = 0.02\ndt_max = 0.002\n"))
        assert main(["energy", "--config", cfg, "--out", str(tmp_path)]) == 0
        header, rows, footer = read_csv(tmp_path / "energy.csv")
        assert header == ["t", "energy", "entropy", "coupling", "laplacian_sq",
                          "gradient_sq", "dissipation", "identity_residual"]
        energies = [float(r[1]) for r in rows]
        assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))

    def test_energy_dimension_2_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, (
            "mode = energy\ndimension = 2\nprofile = bump\nmass_m = 20\nn = 128\n"))
        assert main(["energy", "--config", cfg, "--out", str(tmp_path)]) == 2
