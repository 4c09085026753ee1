import subprocess
import sys

import numpy as np
import pytest

from dynbeam import verify
from dynbeam.cli import main
from dynbeam.harness import read_csv
from dynbeam.instance import read_instance, write_instance
from dynbeam.model import ChannelSet, QosSpec, Topology


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    def test_single_user_closed_form(self, tmp_path, capsys):
        h = np.array([[[1.0 + 1.0j, 0.5, -2.0j]]])
        path = tmp_path / "one.txt"
        write_instance(path, Topology(1, 1, 3, (0,)), QosSpec([10.0], [10.0]), ChannelSet(h))
        code, out, _ = run(capsys, "solve", str(path))
        assert code == 0
        expect = 100.0 / np.sum(np.abs(h) ** 2)
        line = [ln for ln in out.splitlines() if ln.startswith("total power")][0]
        socp, dual = float(line.split()[3]), float(line.split()[5])
        assert socp == pytest.approx(expect, rel=1e-8) and dual == pytest.approx(expect, rel=1e-12)

    def test_random_is_deterministic(self, capsys, tmp_path):
        a = run(capsys, "solve", "--random", "42")
        b = run(capsys, "solve", "--random", "42", "--write-instance", str(tmp_path / "i.txt"))
        assert a == b and a[0] == 0
        assert read_instance(tmp_path / "i.txt").topo == Topology.uniform(2, 2, 4)

    def test_infeasible_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        write_instance(path, Topology(1, 2, 1, (0, 0)), QosSpec.uniform(2, 10.0, 1.0),
                       ChannelSet(np.ones((1, 2, 1))))
        code, out, _ = run(capsys, "solve", str(path))
        assert code == 2
        assert "SOCP: infeasible" in out and "duality: infeasible" in out

    def test_usage_errors(self, capsys, tmp_path):
        assert run(capsys, "solve")[0] == 1
        assert run(capsys, "solve", str(tmp_path / "missing.txt"))[0] == 1
        assert run(capsys, "solve", "--random", "1", "--nt", "0")[0] == 1
        with pytest.raises(SystemExit) as err:
            main(["nonsense"])
        assert err.value.code == 1


class TestTrack:
    def test_one_csv_fifty_rows(self, tmp_path, capsys):
        out = tmp_path / "o"
        code, text, _ = run(capsys, "track", "--rho", "50", "--zeta", "0.01", "--steps", "50",
                            "--seed", "7", "--out", str(out))
        assert code == 0
        (res,) = read_csv(out / "rho_50.csv")
        assert res.steps == 50
        assert "rho=50" in text and "bound violations" in text
        assert len(read_instance(out / "track.txt").channels) == 50
        assert "seed = 7" in (out / "config.txt").read_text()

    def test_rho_sweep_and_config_merge(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("steps = 9\nzeta = 0.02\nrho = 1 50 1000\n")
        out = tmp_path / "o"
        code, _, _ = run(capsys, "ensemble", "--config", str(cfg), "--steps", "2", "--tracks", "2",
                         "--jobs", "1", "--out", str(out))
        assert code == 0
        assert sorted(p.name for p in out.glob("rho_*.csv")) == ["rho_1.csv", "rho_1000.csv", "rho_50.csv"]
        echoed = (out / "config.txt").read_text()
        assert "steps = 2" in echoed and "zeta = 0.02" in echoed
        assert len(read_csv(out / "rho_1.csv")) == 2

    def test_defaults(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run(capsys, "track", "--steps", "1", "--out", str(out))[0] == 0
        text = (out / "config.txt").read_text()
        for line in ("gamma = 10.0", "sigma2 = 10.0", "zeta = 0.01", "nt = 4", "nb = 2",
                     "users_per_bs = 2", "rho = 50.0"):
            assert line in text

    @pytest.mark.parametrize("argv", [
        ["track", "--zeta", "2", "--out", "x"],
        ["track", "--rho", "0", "--out", "x"],
        ["track", "--steps", "1"],
        ["ensemble", "--tracks", "0", "--out", "x"],
        ["track", "--rho", "5", "--rho", "5", "--out", "x"],
    ])
    def test_invalid_flags(self, argv, capsys):
        assert run(capsys, *argv)[0] == 1

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.txt"
        cfg.write_text("colour = red\n")
        assert run(capsys, "track", "--config", str(cfg), "--out", str(tmp_path))[0] == 1


TINY = verify.Scale(oracle_instances=2, static_instances=1, tracks=1, steps=3, planted=3,
                    moment_draws=100_000, increment_draws=10_000)


class TestVerify:
    def test_injected_fault_is_named(self, capsys, monkeypatch):
        monkeypatch.setattr(verify, "QUICK", TINY)
        code, out, _ = run(capsys, "verify", "--quick", "--inject-fault")
        assert code == 3
        assert "FAIL  consensus-index" in out
        assert "verification FAILED" in out and "consensus-index" in out.splitlines()[-1]

    def test_fault_is_undone(self):
        with verify.injected_fault():
            assert not verify.check_consensus_index().passed
        assert verify.check_consensus_index().passed

    def test_one_line_per_check(self, capsys, monkeypatch):
        monkeypatch.setattr(verify, "QUICK", TINY)
        code, out, _ = run(capsys, "verify", "--quick")
        lines = [ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL"))]
        names = [ln.split(":")[0].split(None, 1)[1] for ln in lines]
        assert names[:5] == ["consensus-index", "7 socp-suite", "8 channel-statistics",
                             "1 oracle-equivalence", "2 static-convergence"]
        assert "6 rho-direction" in names
        assert code in (0, 3)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dynbeam.cli", "solve", "--random", "3"],
                          capture_output=True, text=True)
    assert proc.returncode in (0, 2)
    assert "random instance, seed 3" in proc.stdout
