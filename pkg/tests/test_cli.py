import numpy as np
import pytest

from kdsim.cli import main

FERMION_DEGENERATE = """\
experiment = identical-slice
Q = 1
Q_star = 1
P = 1.1
K = 0.2
w = 0.3
n_max = 2
fixed_p = 0
statistics = fermion
q_min = -2
q_max = 2
q_step = 0.1
"""

SWEEP = """\
experiment = complementarity-sweep
Q = 1
Q_star = 0.9
P = 0.75, 1.1, 2, 10
"""


class TestRunPresets:
    def test_fig2_emits_three_curves_manifest_and_svg(self, tmp_path, capsys):
        assert main(["run", "--preset", "fig2", "--out", str(tmp_path), "--svg"]) == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "fig2.svg",
            "fig2_P_0.75.csv",
            "fig2_P_1.1.csv",
            "fig2_P_inf.csv",
            "manifest",
        ]
        out = capsys.readouterr().out
        assert out.count("wrote") == 5

    def test_fig4_emits_six_curves(self, tmp_path):
        assert main(["run", "--preset", "fig4", "--out", str(tmp_path)]) == 0
        csvs = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert len(csvs) == 6
        for stat in ("boson", "fermion"):
            for tag in ("200", "1.1", "0.75"):
                assert f"fig4_{stat}_P_{tag}.csv" in csvs

    def test_fig2_is_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--preset", "fig2", "--out", str(a)]) == 0
        assert main(["run", "--preset", "fig2", "--out", str(b)]) == 0
        for path in a.glob("*.csv"):
            assert path.read_bytes() == (b / path.name).read_bytes()
        assert (a / "manifest").read_bytes() == (b / "manifest").read_bytes()

    def test_manifest_rerun_reproduces_outputs(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["run", "--preset", "fig2", "--out", str(first)]) == 0
        assert main(["run", "--config", str(first / "manifest"), "--out", str(second)]) == 0
        for path in first.glob("*.csv"):
            twin = second / path.name.replace("fig2", "multimode_slice")
            assert path.read_bytes() == twin.read_bytes()


class TestRunConfigs:
    def test_sweep_from_config_file(self, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(SWEEP)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        lines = (out / "complementarity_sweep.csv").read_text().splitlines()
        assert lines[0] == "P,schmidt,overlap"
        assert len(lines) == 5

    def test_degenerate_fermion_exits_3_with_verbatim_diagnostic(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(FERMION_DEGENERATE)
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert code == 3
        assert "state undefined (0/0)" in capsys.readouterr().err

    def test_config_error_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(SWEEP.replace("P = 0.75, 1.1, 2, 10", "P = 0"))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config_file_exits_1(self, tmp_path, capsys):
        code = main(["run", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])
        assert code == 1
        assert "cannot read config" in capsys.readouterr().err

    def test_out_path_collision_exits_1(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code = main(["run", "--preset", "fig2", "--out", str(blocker)])
        assert code == 1

    def test_tail_tol_flag_overrides_truncation(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--preset", "fig2", "--out", str(out), "--tail-tol", "1e-9"]) == 0
        manifest = (out / "manifest").read_text()
        assert "n_max = 3" in manifest
        assert "auto-truncation tail_tol" in manifest

    def test_discontinuity_probe_experiment(self, tmp_path):
        cfg = tmp_path / "probe.cfg"
        cfg.write_text(
            "experiment = discontinuity-probe\np = 0.2\nK_L = 0.2\nK_R = 0.2\nw = 1\n"
            "n_max = 2\nepsilons = 0.1, 0.01, 0.001\nx_min = -5\nx_max = 5\nx_step = 0.5\n"
            "max_separation = 5\n"
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        rows = np.loadtxt(out / "discontinuity_probe.csv", delimiter=",", skiprows=1)
        assert rows.shape == (3, 2)
        assert np.all(np.diff(rows[:, 1]) < 0)

    def test_single_mode_momentum_experiment(self, tmp_path):
        cfg = tmp_path / "channels.cfg"
        cfg.write_text(
            "experiment = single-mode-momentum\np = 0.3\nq = 1.1\nK_L = 0.4\nK_R = 0.2\n"
            "w = 1\nn_max = 2\n"
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        lines = (out / "single_mode_momentum.csv").read_text().splitlines()
        assert lines[0] == "final_left,final_right,branches,probability"
        manifest = (out / "manifest").read_text()
        assert "bookkeeping residual" in manifest

    def test_single_mode_position_experiment(self, tmp_path):
        cfg = tmp_path / "pos.cfg"
        cfg.write_text(
            "experiment = single-mode-position\np = 0.1\nq = 0.9\nK_L = 0.25\nK_R = 0.25\n"
            "w = 1\nn_max = 3\nx_min = -2\nx_max = 2\nx_step = 0.5\n"
            "y_min = -2\ny_max = 2\ny_step = 0.5\n"
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--svg"]) == 0
        lines = (out / "single_mode_position.csv").read_text().splitlines()
        assert lines[0] == "x,y,total,product"
        assert len(lines) == 1 + 9 * 9
        assert (out / "single_mode_position.svg").exists()


class TestOtherCommands:
    def test_preset_list(self, capsys):
        assert main(["preset-list"]) == 0
        out = capsys.readouterr().out
        assert "fig2" in out and "fig4" in out

    def test_verify_passes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("PASS") >= 8

    def test_argparse_rejects_unknown_preset(self):
        with pytest.raises(SystemExit):
            main(["run", "--preset", "fig9", "--out", "/tmp/x"])
