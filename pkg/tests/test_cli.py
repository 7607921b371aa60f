import json
import math
from pathlib import Path

import numpy as np
import pytest

import holonomy_sim.cli as cli
from holonomy_sim.hamiltonians import Schedule, phase_hamiltonian
from holonomy_sim.propagation import Frame, PropagationResult

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def run_cli(argv):
    return cli.main(argv)


def small_runtime_config(tmp_path, grid=(1.0, 3.0, 9.0)):
    cfg = {
        "gate": {"kind": "phase", "a": 0.7605, "T": 1.0},
        "control": {"kind": "no_control"},
        "sweep_variable": "T",
        "grid": list(grid),
        "realizations": 1,
        "master_seed": 42,
        "policy": {"substeps_per_segment": 20, "max_step": None},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


class TestGateCommand:
    def test_zero_amplitude_is_exact_identity_on_dark_state(self, tmp_path):
        out = tmp_path / "gate.json"
        code = run_cli(["gate", "--kind", "phase", "--a", "0", "--T", "10",
                        "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(payload["gamma_measured"]) <= 1e-12
        assert payload["f"] == pytest.approx(1.0, abs=1e-12)

    def test_first_root_amplitude_gives_pi_phase(self, tmp_path):
        out = tmp_path / "gate.json"
        code = run_cli(["gate", "--kind", "phase", "--a", "1.2024", "--T", "100",
                        "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(abs(payload["gamma_measured"]) - math.pi) <= 0.05
        assert payload["unitarity_defect"] <= 1e-9

    def test_cphase_gate_diagonal(self, tmp_path):
        out = tmp_path / "gate.json"
        code = run_cli(["gate", "--kind", "cphase", "--a", "1.2024", "--T", "100",
                        "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        g = np.array([[complex(re, im) for re, im in row]
                      for row in payload["gate_matrix"]])
        np.testing.assert_allclose(np.abs(np.diag(g)), np.ones(4), atol=1e-9)
        assert abs(abs(np.angle(g[3, 3])) - math.pi) <= 0.05

    def test_invalid_kind_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["gate", "--kind", "hadamard", "--a", "1", "--T", "1"])
        assert exc.value.code == 2

    def test_bad_control_json_exits_2(self, tmp_path, capsys):
        code = run_cli(["gate", "--kind", "phase", "--a", "1", "--T", "1",
                        "--control", '{"kind": "nope"}'])
        assert code == 2

    def test_inline_control_accepted(self, tmp_path):
        out = tmp_path / "g.json"
        code = run_cli(["gate", "--kind", "phase", "--a", "0.7605", "--T", "1",
                        "--control",
                        '{"kind": "positive_square", "J": 100, "dt": 0.005, '
                        '"p": 0, "seed": 1}',
                        "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["f"] > 0.9  # control restores adiabaticity at T=1

    def test_unitarity_violation_exits_3(self, tmp_path, monkeypatch):
        broken = PropagationResult(U=np.eye(4, dtype=complex) * 1.5,
                                   steps_taken=1, unitarity_defect=1.0,
                                   frame=Frame.LAB)
        monkeypatch.setattr(cli, "propagate_lab", lambda *a, **k: broken)
        code = run_cli(["gate", "--kind", "phase", "--a", "0", "--T", "1",
                        "--out", str(tmp_path / "g.json")])
        assert code == 3


class TestSweepCommand:
    def test_runtime_sweep_writes_outputs(self, tmp_path):
        cfg = small_runtime_config(tmp_path)
        out = tmp_path / "out"
        code = run_cli(["sweep", "--experiment", "runtime", "--config", str(cfg),
                        "--out-dir", str(out), "--threads", "1"])
        assert code == 0
        assert (out / "results.csv").exists()
        assert (out / "bundle.json").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["outputs"] == ["results.csv", "bundle.json"]
        assert manifest["total_steps"] > 0
        assert "PCG64" in manifest["rng"]

    def test_same_seed_gives_identical_csv_bytes(self, tmp_path):
        cfg = small_runtime_config(tmp_path)
        blobs = []
        for name in ("o1", "o2"):
            out = tmp_path / name
            assert run_cli(["sweep", "--experiment", "runtime", "--config",
                            str(cfg), "--seed", "7", "--out-dir", str(out)]) == 0
            blobs.append((out / "results.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_thread_count_does_not_change_csv_bytes(self, tmp_path):
        cfg = small_runtime_config(tmp_path)
        blobs = []
        for name, threads in (("t1", "1"), ("t4", "4")):
            out = tmp_path / name
            assert run_cli(["sweep", "--experiment", "runtime", "--config",
                            str(cfg), "--out-dir", str(out),
                            "--threads", threads]) == 0
            blobs.append((out / "results.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_plot_polyline_matches_grid_size(self, tmp_path):
        cfg = small_runtime_config(tmp_path, grid=(1.0, 2.0, 4.0, 8.0, 16.0))
        out = tmp_path / "out"
        code = run_cli(["sweep", "--experiment", "runtime", "--config", str(cfg),
                        "--out-dir", str(out), "--plot"])
        assert code == 0
        svg = (out / "plot.svg").read_text()
        points = svg.split('points="')[1].split('"')[0]
        assert len(points.split()) == 5

    def test_kick_equivalence_report(self, tmp_path):
        cfg = {
            "gate": {"kind": "phase", "a": 0.7605, "T": 1.0},
            "control": {"kind": "delta_kick_positive", "dt": 0.2},
            "sweep_variable": "dt",
            "grid": [0.2],
            "master_seed": 9,
        }
        path = tmp_path / "kick.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "out"
        code = run_cli(["sweep", "--experiment", "kick-equivalence",
                        "--config", str(path), "--out-dir", str(out)])
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["max_unitary_diff"] <= 1e-10
        assert report["net_area_positive"] == pytest.approx(4 * math.pi)
        assert report["net_area_alternating"] == pytest.approx(0.0, abs=1e-12)

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = json.loads(small_runtime_config(tmp_path).read_text())
        cfg["surprise"] = True
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        assert run_cli(["sweep", "--experiment", "runtime", "--config", str(path),
                        "--out-dir", str(tmp_path / "o")]) == 2

    def test_mismatched_control_kind_exits_2(self, tmp_path):
        cfg = json.loads(small_runtime_config(tmp_path).read_text())
        cfg["control"] = {"kind": "positive_square", "J": 1.0, "dt": 0.1}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        assert run_cli(["sweep", "--experiment", "runtime", "--config", str(path),
                        "--out-dir", str(tmp_path / "o")]) == 2

    def test_unwritable_out_dir_exits_4(self, tmp_path):
        cfg = small_runtime_config(tmp_path)
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        out = blocker / "sub"
        assert run_cli(["sweep", "--experiment", "runtime", "--config", str(cfg),
                        "--out-dir", str(out)]) == 4

    def test_env_var_thread_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HOLONOMY_SIM_THREADS", "2")
        assert cli._resolve_threads(None) == 2
        monkeypatch.delenv("HOLONOMY_SIM_THREADS")
        assert cli._resolve_threads(3) == 3

    def test_shipped_runtime_config_reaches_adiabatic_plateau(self, tmp_path):
        out = tmp_path / "out"
        code = run_cli(["sweep", "--experiment", "runtime",
                        "--config", str(CONFIG_DIR / "runtime.json"),
                        "--out-dir", str(out), "--threads", "2"])
        assert code == 0
        lines = (out / "results.csv").read_text().strip().splitlines()[1:]
        xs = [float(l.split(",")[0]) for l in lines]
        fs = [float(l.split(",")[1]) for l in lines]
        assert len(lines) == 40
        assert xs == sorted(xs) and xs[-1] == pytest.approx(100.0)
        assert fs[-1] >= 0.99
        # broad upward trend from the nonadiabatic end to the plateau
        assert np.mean(fs[-5:]) > np.mean(fs[:5]) + 0.3


class TestSelftest:
    def test_selftest_passes_and_lists_groups(self, capsys):
        assert run_cli(["selftest"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if "PASS" in l]
        assert len(lines) >= 6

    def test_sign_mutation_breaks_dark_state_invariant(self):
        """A flipped coupling sign must be caught by the dark-state check.

        Mirrors the documented mutation test: break one sign in the
        phase-gate generator and the selftest's annihilation invariant
        fails loudly.
        """
        s = Schedule(0.7605, 1.0)
        t = 0.37
        h = phase_hamiltonian(s, t)
        broken = h.copy()
        broken[1, 2] *= -1.0
        broken[2, 1] *= -1.0
        d1 = np.zeros(4, dtype=complex)
        d1[1] = math.cos(s.theta(t))
        d1[3] = -np.exp(-1j * s.phi(t)) * math.sin(s.theta(t))
        assert np.linalg.norm(h @ d1) <= 1e-14          # healthy generator
        assert np.linalg.norm(broken @ d1) > 1e-2       # mutated one fails
