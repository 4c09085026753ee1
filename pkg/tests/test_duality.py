import numpy as np
import pytest

from dynbeam.builders import build_centralized
from dynbeam.duality import (DegenerateDirectionError, InfeasibleError, coupling_matrices,
                             extract_consensus_duals, is_feasible, power_from_coupling,
                             reference_point, solve_power_allocation, solve_uplink_fixed_point)
from dynbeam.model import ChannelSet, QosSpec, Topology, build_consensus_index, sinr_all
from dynbeam.socp import SolveStatus, solve
from dynbeam.tracks import sample_initial


class TestFixedPoint:
    def test_single_user_closed_form(self):
        topo = Topology(1, 1, 4, (0,))
        H = ChannelSet(np.eye(4)[None, :1])
        q = QosSpec([10.0], [10.0])
        sol = solve_uplink_fixed_point(H, topo, q)
        # unit-noise multiplier gamma/||h||^2; times sigma^2 it is the optimal power
        assert sol.lam[0] * q.sigma2[0] == pytest.approx(100.0, rel=1e-12)
        assert sol.total_power == pytest.approx(100.0, rel=1e-12)
        np.testing.assert_allclose(sol.directions[0], np.eye(4)[0], atol=1e-14)

    def test_decoupled_cells(self):
        rng = np.random.default_rng(2)
        topo = Topology.uniform(2, 1, 3)
        q = QosSpec([4.0, 6.0], [1.0, 2.0])
        h = np.zeros((2, 2, 3), dtype=complex)
        h[0, 0] = rng.standard_normal(3)
        h[1, 1] = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        sol = solve_uplink_fixed_point(ChannelSet(h), topo, q)
        for k, b in enumerate(topo.assign):
            single = q.gamma[k] * q.sigma2[k] / np.vdot(h[b, k], h[b, k]).real
            assert sol.powers[k] == pytest.approx(single, rel=1e-12)

    def test_strong_duality_and_tightness(self, topo, qos, instances):
        for H in instances:
            sol = solve_uplink_fixed_point(H, topo, qos)
            primal = float(np.sum(np.abs(sol.W_star) ** 2))
            assert abs(sol.dual_power - primal) <= 1e-5 * max(1.0, primal)
            np.testing.assert_allclose(sinr_all(sol.W_star, H, topo, qos), qos.gamma, rtol=1e-9)
            assert sol.monotone
            np.testing.assert_allclose(np.linalg.norm(sol.directions, axis=1), 1.0, rtol=1e-12)

    def test_power_system_residual(self, topo, qos, instances):
        sol = solve_uplink_fixed_point(instances[0], topo, qos)
        Psi, D, sigma = coupling_matrices(sol.directions, instances[0], topo, qos)
        assert np.all(Psi >= 0) and np.all(np.diag(Psi) == 0)
        r = (np.eye(4) - D @ Psi) @ sol.powers - D @ sigma
        assert np.linalg.norm(r) <= 1e-10 * np.linalg.norm(D @ sigma)

    def test_zero_direct_channel(self):
        topo = Topology(1, 1, 2, (0,))
        with pytest.raises(DegenerateDirectionError):
            solve_uplink_fixed_point(ChannelSet(np.zeros((1, 1, 2))), topo, QosSpec([1.0], [1.0]))


class TestPowerAllocation:
    def test_two_by_two(self):
        Psi = np.array([[0.0, 0.5], [0.5, 0.0]])
        np.testing.assert_allclose(power_from_coupling(Psi, np.eye(2), np.ones(2)), [2.0, 2.0], rtol=1e-14)

    def test_no_coupling(self):
        D = np.diag([2.0, 3.0])
        np.testing.assert_allclose(power_from_coupling(np.zeros((2, 2)), D, np.array([1.0, 5.0])), [2.0, 15.0])

    def test_spectral_radius_too_large(self):
        Psi = np.array([[0.0, 1.5], [1.5, 0.0]])
        with pytest.raises(InfeasibleError):
            power_from_coupling(Psi, np.eye(2), np.ones(2))

    def test_requires_unit_directions(self, topo, qos, instances):
        with pytest.raises(ValueError):
            solve_power_allocation(2 * np.ones((4, 4)) + 0j, instances[0], topo, qos)

    def test_orthogonal_direction(self):
        topo = Topology(1, 1, 2, (0,))
        H = ChannelSet(np.array([[[1.0, 0.0]]]))
        with pytest.raises(DegenerateDirectionError):
            solve_power_allocation(np.array([[0.0, 1.0]]) + 0j, H, topo, QosSpec([1.0], [1.0]))


class TestFeasibility:
    def test_single_user_always_feasible(self):
        topo = Topology(1, 1, 2, (0,))
        H = ChannelSet(np.array([[[1e-3, 2e-3j]]]))
        assert is_feasible(H, topo, QosSpec([1e4], [1.0]))

    def test_identical_channels_rank_deficient(self):
        # K = 3 > N_T * B = 2 identical channels at SINR 10: infeasible by both oracles
        topo = Topology(2, 3, 1, (0, 0, 1))
        H = ChannelSet(np.ones((2, 3, 1), dtype=complex))
        q = QosSpec.uniform(3, 10.0, 1.0)
        assert not is_feasible(H, topo, q)
        assert solve(build_centralized(H, topo, q)[0]).status is SolveStatus.INFEASIBLE

    def test_agrees_with_socp_status(self):
        topo = Topology.uniform(2, 2, 3)
        q = QosSpec.uniform(4, 3.0, 1.0)
        verdicts = set()
        for j in range(40):
            H = sample_initial(topo, 77, j)
            fp = is_feasible(H, topo, q)
            st = solve(build_centralized(H, topo, q)[0]).status
            assert st in (SolveStatus.OPTIMAL, SolveStatus.INFEASIBLE)
            assert fp == (st is SolveStatus.OPTIMAL)
            verdicts.add(fp)
        assert verdicts == {True, False}


class TestConsensusDuals:
    def test_zero_cross_channels(self):
        topo = Topology.uniform(2, 1, 2)
        h = np.zeros((2, 2, 2), dtype=complex)
        h[0, 0] = [1, 0]
        h[1, 1] = [0, 1]
        ref = reference_point(ChannelSet(h), topo, QosSpec.uniform(2, 1, 1), build_consensus_index(topo))
        np.testing.assert_array_equal(ref.nu, 0.0)

    def test_antisymmetric_copies(self, topo, qos, instances):
        idx = build_consensus_index(topo)
        ref = reference_point(instances[0], topo, qos, idx)
        assert np.all(idx.collect(ref.nu) == 0.0)
        assert np.any(ref.nu != 0)
        # full copy vector and pair vector give the same multipliers
        np.testing.assert_array_equal(extract_consensus_duals(ref.dual, ref.t, idx),
                                      extract_consensus_duals(ref.dual, ref.tau, idx))

    def test_bad_length(self, topo, qos, instances):
        idx = build_consensus_index(topo)
        ref = reference_point(instances[0], topo, qos, idx)
        with pytest.raises(ValueError):
            extract_consensus_duals(ref.dual, np.zeros(3), idx)
