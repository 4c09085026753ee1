import numpy as np
import pytest

from dynbeam.builders import LocalTemplate, ZeroChannelError, build_centralized, build_local
from dynbeam.duality import solve_uplink_fixed_point
from dynbeam.model import ChannelSet, QosSpec, Topology, build_consensus_index, sinr_all
from dynbeam.socp import SolverOptions, solve

from conftest import random_channels


def centralized(H, topo, q, tol=1e-10):
    prog, vmap = build_centralized(H, topo, q)
    rep = solve(prog, SolverOptions(tol=tol))
    assert rep.optimal
    return vmap.beamformers(rep.x), rep.objective


class TestCentralized:
    def test_single_user_matched_filter(self):
        h = np.array([1.0 + 2.0j, -0.5j, 0.3])
        topo = Topology(1, 1, 3, (0,))
        q = QosSpec([10.0], [10.0])
        W, power = centralized(ChannelSet(h[None, None]), topo, q)
        g = np.vdot(h, h).real
        assert power == pytest.approx(100.0 / g, rel=1e-8)
        np.testing.assert_allclose(W[0], np.sqrt(100.0) * h / g, atol=1e-6)

    def test_homogeneity(self, topo, qos, instances):
        H = instances[0]
        _, p1 = centralized(H, topo, qos)
        _, p2 = centralized(H.scaled(3.0), topo, qos)
        assert p2 == pytest.approx(p1 / 9.0, rel=1e-7)

    def test_agrees_with_duality(self, topo, qos, instances):
        for H in instances:
            _, p = centralized(H, topo, qos)
            assert p == pytest.approx(solve_uplink_fixed_point(H, topo, qos).total_power, rel=1e-5)

    def test_constraints_tight_and_phase_fixed(self, topo, qos, instances):
        H = instances[1]
        W, _ = centralized(H, topo, qos)
        np.testing.assert_allclose(sinr_all(W, H, topo, qos), qos.gamma, rtol=1e-6)
        for k in range(topo.n_users):
            h = H.h[topo.assign[k], k]
            amp = np.vdot(h, W[k])
            assert amp.real >= 0
            assert abs(amp.imag) <= 1e-8 * np.linalg.norm(W[k]) * np.linalg.norm(h)

    def test_direction_matches_duality(self, topo, qos, instances):
        H = instances[2]
        W, _ = centralized(H, topo, qos, tol=1e-12)
        dual = solve_uplink_fixed_point(H, topo, qos)
        unit = W / np.linalg.norm(W, axis=1, keepdims=True)
        assert np.max(np.linalg.norm(unit - dual.directions, axis=1)) <= 1e-4

    def test_zero_direct_channel(self):
        topo = Topology.uniform(2, 1, 2)
        h = np.ones((2, 2, 2), dtype=complex)
        h[1, 1] = 0
        with pytest.raises(ZeroChannelError) as err:
            build_centralized(ChannelSet(h), topo, QosSpec.uniform(2, 1, 1))
        assert err.value.user == 1


def decoupled(rng, topo):
    h = random_channels(rng, topo).h.copy()
    for k in range(topo.n_users):
        for m in range(topo.n_bs):
            if m != topo.assign[k]:
                h[m, k] = 0
    return ChannelSet(h)


class TestLocal:
    def test_decoupled_cells(self):
        rng = np.random.default_rng(4)
        topo = Topology.uniform(2, 2, 3)
        q = QosSpec.uniform(4, 5.0, 1.0)
        H = decoupled(rng, topo)
        W_c, _ = centralized(H, topo, q)
        idx = build_consensus_index(topo)
        for b in range(2):
            prog, vmap = build_local(b, H, topo, q, np.zeros(idx.n_tau), np.zeros(4), 10.0, idx)
            rep = solve(prog, SolverOptions(tol=1e-10))
            assert rep.optimal
            np.testing.assert_allclose(vmap.copies(rep.x), 0.0, atol=1e-5)
            np.testing.assert_allclose(vmap.beamformers(rep.x), W_c[list(topo.served[b])], atol=1e-5)

    @pytest.mark.parametrize("y_owner, expect", [(5.0, 5.0), (-3.0, 0.0), (0.7, 0.7)])
    def test_caused_interference_projection(self, y_owner, expect):
        # cross channel orthogonal to the own channel: the optimal beam causes no
        # interference, so the owner copy is the projection of y onto t >= 0
        topo = Topology.uniform(2, 1, 2)
        h = np.zeros((2, 2, 2), dtype=complex)
        h[0, 0] = [1, 0]
        h[0, 1] = [0, 1]
        h[1, 1] = [1, 0]
        h[1, 0] = [0, 1]
        H = ChannelSet(h)
        q = QosSpec.uniform(2, 2.0, 1.0)
        tmpl = LocalTemplate(0, H, topo, q, rho=4.0)
        labels = tmpl.labels
        y = np.zeros(len(labels))
        y[labels.index((0, 1))] = y_owner
        rep = solve(tmpl.program(y), SolverOptions(tol=1e-10))
        t = tmpl.vmap.copies(rep.x)
        assert t[labels.index((0, 1))] == pytest.approx(expect, abs=1e-6)
        # no pull on the sufferer slot: weakly active at zero, so only ~sqrt(tol) accurate
        assert t[labels.index((1, 0))] == pytest.approx(0.0, abs=1e-5)

    def test_template_matches_build_local(self, topo, qos, instances):
        H = instances[0]
        idx = build_consensus_index(topo)
        rng = np.random.default_rng(0)
        tau = rng.random(idx.n_tau)
        nu = rng.standard_normal(idx.n_t)
        tmpl = LocalTemplate(1, H, topo, qos, 7.0, idx)
        y = idx.expand(tau)[idx.block[1]] - nu[idx.block[1]] / 7.0
        prog, _ = build_local(1, H, topo, qos, tau, nu[idx.block[1]], 7.0, idx)
        np.testing.assert_array_equal(tmpl.program(y).b, prog.b)

    def test_always_feasible(self, topo, qos, instances):
        # huge disagreement targets never make the local problem infeasible
        H = instances[3]
        idx = build_consensus_index(topo)
        for b in range(2):
            tmpl = LocalTemplate(b, H, topo, qos, 50.0, idx)
            for y in (np.full(4, -1e4), np.full(4, -1e3), np.full(4, 1e4), np.zeros(4)):
                assert solve(tmpl.program(y)).optimal

    def test_bad_rho_and_target(self, topo, qos, instances):
        with pytest.raises(ValueError):
            LocalTemplate(0, instances[0], topo, qos, 0.0)
        with pytest.raises(ValueError):
            LocalTemplate(0, instances[0], topo, qos, 1.0).program(np.zeros(3))
