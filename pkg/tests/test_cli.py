import csv
import subprocess
import sys

import pytest

from fracrd.cli import main
from fracrd.config import PRESETS, parse_config
from fracrd.io import read_pgm, read_snapshot

# front width sqrt(eps2 * delta) ~ 0.045 spans about one cell at n = 32, so the range stays clean
RESOLVED = """\
preset = nagumo-fig1
[model]
alpha = 0.85
eps2 = 0.2
[initial]
size = 0.3
u = 0.9
mollifier_width = 0.3
"""


@pytest.fixture
def resolved_config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(RESOLVED)
    return path


class TestRun:
    def test_unknown_preset_exit_2(self, tmp_path, capsys):
        assert main(["run", "--preset", "nagumo-fig9", "--out", str(tmp_path)]) == 2
        err = capsys.readouterr().err
        assert "unknown preset" in err
        for name in PRESETS:
            assert name in err

    def test_bad_config_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text(RESOLVED.replace("alpha = 0.85", "alpha = 1.5"))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "alpha" in capsys.readouterr().err

    def test_missing_config_file_exit_2(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.ini")]) == 2

    def test_run_directory(self, tmp_path, resolved_config, capsys):
        out = tmp_path / "run"
        code = main(["run", "--config", str(resolved_config), "--n", "32", "--T", "0.2",
                     "--formats", "bin,csv,pgm", "--out", str(out)])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert any(line.startswith("PASS range_u") for line in lines)
        rows = list(csv.DictReader((out / "diagnostics.csv").open()))
        assert len(rows) == 5  # snapshots every 0.05 up to 0.2
        assert float(rows[-1]["t"]) == 0.2
        summary = (out / "summary.txt").read_text()
        assert "exit_status = 0" in summary and "FAIL energy" not in summary
        snaps = sorted((out / "snapshots").glob("*.frde"))
        assert snaps and read_snapshot(snaps[-1]).t == pytest.approx(0.2)
        assert read_pgm(sorted((out / "snapshots").glob("*_u.pgm"))[0]).shape == (32, 32)
        echoed = parse_config((out / "config.echo").read_text())
        assert echoed.grid.Nx == 32 and echoed.T == 0.2 and echoed.eps2 == 0.2

    def test_snapshots_hold_original_variables(self, tmp_path):
        out = tmp_path / "gs"
        main(["run", "--preset", "gs-rings", "--n", "32", "--T", "2", "--dt", "1", "--out", str(out)])
        first = read_snapshot(sorted((out / "snapshots").glob("*.frde"))[0])
        u, v = first.fields
        assert u.max() == pytest.approx(1.0) and u.min() == pytest.approx(0.5, abs=1e-12)
        assert v.max() == pytest.approx(0.25, abs=1e-12)

    def test_console_script(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "fracrd.cli", "run", "--preset", "missing"],
                              capture_output=True, text=True)
        assert proc.returncode == 2

    @pytest.mark.slow
    def test_documented_desk_run(self, tmp_path):
        # the stated desk-scale example; the n = 128 front is under-resolved, so the range monitor trips
        out = tmp_path / "desk"
        code = main(["run", "--preset", "nagumo-fig1", "--alpha", "0.85", "--n", "128", "--T", "1",
                     "--out", str(out)])
        rows = list(csv.DictReader((out / "diagnostics.csv").open()))
        assert rows
        summary = (out / "summary.txt").read_text()
        assert "PASS range_u" in summary
        assert code == 0


class TestSweep:
    def test_alpha_sweep_layout(self, tmp_path):
        out = tmp_path / "sweep"
        main(["sweep", "--preset", "nagumo-fig1", "--alpha", "0.65,0.75,0.85,0.95", "--n", "32",
              "--T", "0.1", "--out", str(out)])
        dirs = sorted(p.name for p in out.iterdir() if p.is_dir())
        assert dirs == ["alpha_0.65", "alpha_0.75", "alpha_0.85", "alpha_0.95"]
        for d in dirs:
            assert (out / d / "diagnostics.csv").exists()
        rows = list(csv.DictReader((out / "area_theta.csv").open()))
        assert len(rows) == 3
        assert list(rows[0]) == ["t"] + [f"area_0.5[alpha={a}]" for a in ("0.65", "0.75", "0.85", "0.95")]

    def test_sweep_needs_values(self, tmp_path):
        assert main(["sweep", "--preset", "nagumo-fig1", "--out", str(tmp_path)]) == 2

    def test_beta_sweep_gray_scott(self, tmp_path):
        out = tmp_path / "b"
        main(["sweep", "--preset", "gs-rings", "--beta", "0.75,0.95", "--n", "16", "--T", "3",
              "--out", str(out), "--jobs", "2"])
        echoes = [parse_config((out / d / "config.echo").read_text()) for d in ("beta_0.75", "beta_0.95")]
        assert [e.model.beta for e in echoes] == [0.75, 0.95]


class TestCheck:
    def test_check_prints_echo_and_passes(self, capsys):
        assert main(["check", "--preset", "gs-rings", "--n", "32"]) == 0
        out = capsys.readouterr().out
        assert "[model]" in out and "kappa = 0.063" in out
        assert out.count("PASS") == 2

    def test_check_rejects_bad_flag_value(self, capsys):
        assert main(["check", "--preset", "nagumo-fig1"]) == 2
