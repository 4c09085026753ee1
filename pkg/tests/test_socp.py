import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynbeam.socp import (ConeProgram, ConeProgramError, NonNeg, SecondOrder, SolverOptions,
                          SolveStatus, Zero, certificate_residual, dump_program, kkt_residuals,
                          load_program, solve)
from dynbeam.verify import infeasible_programs, planted_program


class TestConeProgram:
    def test_cone_sizes_must_cover_rows(self):
        with pytest.raises(ConeProgramError):
            ConeProgram([1.0], [[1.0], [2.0]], [0.0, 0.0], (NonNeg(1),))

    def test_nonfinite_data(self):
        prog = ConeProgram([1.0], [[np.inf]], [0.0], (NonNeg(1),))
        with pytest.raises(ConeProgramError):
            solve(prog)

    def test_dump_roundtrip(self, tmp_path):
        prog, _ = planted_program(np.random.default_rng(3))
        path = tmp_path / "p.mtx"
        dump_program(prog, path)
        back = load_program(path)
        np.testing.assert_array_equal(back.A, prog.A)
        np.testing.assert_array_equal(back.b, prog.b)
        np.testing.assert_array_equal(back.c, prog.c)
        assert back.cones == prog.cones


class TestSmallPrograms:
    def test_cone_boundary(self):
        # minimize x2 subject to ||x1|| <= x2 and x1 = 3
        A = np.array([[1.0, 0.0], [0.0, -1.0], [-1.0, 0.0]])
        rep = solve(ConeProgram([0.0, 1.0], A, [3.0, 0.0, 0.0], (Zero(1), SecondOrder(2))))
        assert rep.status is SolveStatus.OPTIMAL
        assert rep.x[1] == pytest.approx(3.0, abs=1e-7)

    def test_halfline(self):
        rep = solve(ConeProgram([1.0], [[-1.0]], [-1.0], (NonNeg(1),)))
        assert rep.optimal and rep.x[0] == pytest.approx(1.0, abs=1e-8)

    def test_size_one_soc_acts_as_nonneg(self):
        rep = solve(ConeProgram([1.0], [[-1.0]], [-1.0], (SecondOrder(1),)))
        assert rep.optimal and rep.x[0] == pytest.approx(1.0, abs=1e-8)

    def test_unbounded(self):
        rep = solve(ConeProgram([-1.0], [[-1.0]], [0.0], (NonNeg(1),)))
        assert rep.status is SolveStatus.UNBOUNDED
        assert rep.certificate[0] > 0

    def test_iteration_cap_returns_best(self):
        prog, obj = planted_program(np.random.default_rng(8))
        rep = solve(prog, SolverOptions(max_iters=3))
        assert rep.status is SolveStatus.MAX_ITERATIONS
        assert np.all(np.isfinite(rep.x))

    @pytest.mark.parametrize("name", ["halfline-vs-point", "shared-antenna-beamforming"])
    def test_infeasible_certificates(self, name):
        prog = infeasible_programs()[name]
        rep = solve(prog)
        assert rep.status is SolveStatus.INFEASIBLE
        assert certificate_residual(prog, rep.certificate) <= 1e-8

    def test_certificate_residual_rejects_nonimproving(self):
        prog = infeasible_programs()["halfline-vs-point"]
        assert certificate_residual(prog, np.zeros(2)) == np.inf


class TestPlanted:
    @given(seed=st.integers(0, 2**32 - 1))
    def test_recovers_planted_objective(self, seed):
        prog, obj = planted_program(np.random.default_rng(seed))
        rep = solve(prog)
        assert rep.status is SolveStatus.OPTIMAL
        assert abs(rep.objective - obj) <= 1e-7 * max(1.0, abs(obj))

    @given(seed=st.integers(0, 2**32 - 1))
    def test_recomputed_kkt_residuals(self, seed):
        prog, _ = planted_program(np.random.default_rng(seed))
        opts = SolverOptions()
        rep = solve(prog, opts)
        assert rep.optimal
        assert max(rep.residuals) <= opts.tol
        assert max(kkt_residuals(prog, rep.x, rep.y)) <= 10 * opts.tol

    def test_tight_tolerance(self):
        prog, obj = planted_program(np.random.default_rng(21))
        rep = solve(prog, SolverOptions(tol=1e-12))
        assert rep.optimal
        assert abs(rep.objective - obj) <= 1e-10 * max(1.0, abs(obj))


def test_matches_reference_solver_when_available():
    cp = pytest.importorskip("cvxpy")
    prog, _ = planted_program(np.random.default_rng(99))
    x = cp.Variable(prog.n_vars)
    s = prog.b - prog.A @ x
    cons, start = [], 0
    for cone in prog.cones:
        blk = s[start:start + cone.size]
        start += cone.size
        if cone.kind == "zero":
            cons.append(blk == 0)
        elif cone.kind == "nonneg":
            cons.append(blk >= 0)
        else:
            cons.append(cp.SOC(blk[0], blk[1:]))
    ref = cp.Problem(cp.Minimize(prog.c @ x), cons).solve()
    assert solve(prog).objective == pytest.approx(ref, rel=1e-6, abs=1e-6)
