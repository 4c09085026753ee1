"""Centralized optimum through uplink-downlink duality.

The minimum-power problem has Lagrangian

    L = sum_k ||w_k||^2 - sum_k lam_k (|h_{b(k)k}^H w_k|^2 / gamma_k
                                       - sum_{i != k} |h_{b(i)k}^H w_i|^2 - sigma_k^2)

and its dual multipliers solve the virtual-uplink fixed point

    lam_k = gamma_k / (h_{b(k)k}^H (I + sum_{j != k} lam_j h_{b(k)j} h_{b(k)j}^H)^{-1} h_{b(k)k})

in which every virtual receiver sees unit noise.  The optimal power equals
``sum_k lam_k sigma_k^2`` and the optimal directions are the regularized
matched filters ``(I + sum_j lam_j h_{b(k)j} h_{b(k)j}^H)^{-1} h_{b(k)k}``.
Downlink powers then come from a K x K linear system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelSet, ConsensusIndex, QosSpec, Topology, gain_matrix, true_copies


class DualityError(ValueError):
    pass


class InfeasibleError(DualityError):
    """The SINR targets cannot be met on this channel."""


class DegenerateDirectionError(DualityError):
    """A beamforming direction is orthogonal to its own user's channel."""


@dataclass(frozen=True)
class UplinkOptions:
    tol: float = 1e-10
    max_iters: int = 5000
    divergence_cap: float = 1e9


@dataclass(frozen=True)
class DualSolution:
    """Optimal multipliers, unit directions, downlink powers and beamformers."""

    lam: np.ndarray
    directions: np.ndarray
    powers: np.ndarray
    W_star: np.ndarray
    dual_power: float
    iterations: int
    monotone: bool

    @property
    def total_power(self) -> float:
        return float(np.sum(self.powers))


def _serving_stack(H: ChannelSet, topo: Topology) -> np.ndarray:
    """``S[k, j] = h_{b(k)j}``: channel from user k's base station to user j."""
    return H.h[list(topo.assign)]


def _receive_covariance(S_k: np.ndarray, lam: np.ndarray, k: int) -> np.ndarray:
    """``I + sum_{j != k} lam_j h_{b(k)j} h_{b(k)j}^H``."""
    wts = lam.copy()
    wts[k] = 0.0
    return np.eye(S_k.shape[1], dtype=complex) + (S_k.T * wts) @ S_k.conj()


def solve_uplink_fixed_point(H: ChannelSet, topo: Topology, q: QosSpec,
                             opts: UplinkOptions | None = None) -> DualSolution:
    """Dual multipliers, directions and powers of the centralized problem.

    Raises
    ------
    InfeasibleError
        When the iteration diverges past the cap or does not settle within
        the iteration budget.
    DegenerateDirectionError
        When a user's direct channel is zero.
    """
    opts = opts or UplinkOptions()
    H.check(topo)
    K = topo.n_users
    S = _serving_stack(H, topo)
    direct = S[np.arange(K), np.arange(K)]
    gains = np.sum(np.abs(direct) ** 2, axis=1)
    if np.any(gains == 0):
        raise DegenerateDirectionError(
            f"user {int(np.argmin(gains)) + 1} has a zero direct channel")

    # Jacobi iteration from zero: monotone nondecreasing for standard interference functions
    lam = np.zeros(K)
    initial = q.gamma / gains
    cap = opts.divergence_cap * float(np.max(initial))
    monotone = True
    it = 0
    converged = False
    for it in range(1, opts.max_iters + 1):
        new = np.empty(K)
        for k in range(K):
            R = _receive_covariance(S[k], lam, k)
            hk = direct[k]
            new[k] = q.gamma[k] / np.real(hk.conj() @ np.linalg.solve(R, hk))
        if np.any(new < lam * (1 - 1e-12) - 1e-300):
            monotone = False
        change = np.max(np.abs(new - lam) / np.maximum(new, 1e-300))
        lam = new
        if not np.all(np.isfinite(lam)) or np.max(lam) > cap:
            raise InfeasibleError(f"uplink multipliers diverged after {it} iterations")
        if change <= opts.tol:
            converged = True
            break
    if not converged:
        raise InfeasibleError(f"uplink fixed point not reached in {opts.max_iters} iterations")

    dirs = np.empty((K, topo.n_tx), dtype=complex)
    for k in range(K):
        R = _receive_covariance(S[k], lam, k)
        v = np.linalg.solve(R, direct[k])
        v /= np.linalg.norm(v)
        # phase convention: h_{b(k)k}^H w_k real and positive
        amp = direct[k].conj() @ v
        dirs[k] = v * np.conj(amp) / abs(amp)

    p = solve_power_allocation(dirs, H, topo, q)
    W = np.sqrt(p)[:, None] * dirs
    return DualSolution(lam, dirs, p, W, float(lam @ q.sigma2), it, monotone)


def coupling_matrices(directions: np.ndarray, H: ChannelSet, topo: Topology, q: QosSpec):
    """``(Psi, D, sigma)`` of the downlink power equations for unit directions."""
    G = gain_matrix(directions, H, topo)
    g = np.diag(G).copy()
    if np.any(g <= 0):
        k = int(np.argmin(g))
        raise DegenerateDirectionError(f"direction of user {k + 1} is orthogonal to its channel")
    Psi = G.copy()
    np.fill_diagonal(Psi, 0.0)
    D = np.diag(q.gamma / g)
    return Psi, D, np.array(q.sigma2)


def power_from_coupling(Psi: np.ndarray, D: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """``p = (I - D Psi)^{-1} D sigma``, or :class:`InfeasibleError` when rho(D Psi) >= 1."""
    M = D @ Psi
    radius = float(np.max(np.abs(np.linalg.eigvals(M)))) if M.size else 0.0
    if radius >= 1.0:
        raise InfeasibleError(f"spectral radius {radius:.6g} of D Psi is not below 1")
    return np.linalg.solve(np.eye(M.shape[0]) - M, D @ sigma)


def solve_power_allocation(directions: np.ndarray, H: ChannelSet, topo: Topology,
                           q: QosSpec) -> np.ndarray:
    """Downlink powers meeting every SINR target with equality for fixed unit directions."""
    dirs = np.asarray(directions)
    norms = np.linalg.norm(dirs, axis=1)
    if not np.allclose(norms, 1.0, rtol=1e-9, atol=0):
        raise ValueError("directions must have unit norm")
    return power_from_coupling(*coupling_matrices(dirs, H, topo, q))


def extract_consensus_duals(dual: DualSolution, t_star: np.ndarray,
                            index: ConsensusIndex) -> np.ndarray:
    """Multipliers of the copy-consistency constraints at the optimum.

    With the per-copy constraint ``t - E tau = 0`` carrying multiplier ``nu``,
    stationarity in the sufferer copy ``t_mk^(b(k))`` (which enters user k's
    SINR constraint as ``t^2``) gives ``nu = -2 lam_k t_mk`` and stationarity
    in ``tau_mk`` forces the owner copy to carry the opposite value.

    Parameters
    ----------
    t_star : ndarray
        Either the full copy vector (length ``index.n_t``) or the consistent
        values per pair (length ``index.n_tau``).
    """
    t_star = np.asarray(t_star, dtype=float)
    if t_star.size == index.n_t:
        t_pair = index.average(t_star)
    elif t_star.size == index.n_tau:
        t_pair = t_star
    else:
        raise ValueError("t_star length matches neither copy nor pair count")
    nu = np.zeros(index.n_t)
    for p, (m, k) in enumerate(index.pairs):
        val = 2.0 * dual.lam[k] * t_pair[p]
        nu[index.owner_row[p]] = val
        nu[index.sufferer_row[p]] = -val
    return nu


@dataclass(frozen=True)
class ReferencePoint:
    """Centralized optimum expressed in the distributed variables."""

    W: np.ndarray
    t: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    power: float
    dual: DualSolution


def reference_point(H: ChannelSet, topo: Topology, q: QosSpec, index: ConsensusIndex,
                    opts: UplinkOptions | None = None) -> ReferencePoint:
    dual = solve_uplink_fixed_point(H, topo, q, opts)
    t = true_copies(dual.W_star, H, index)
    tau = index.average(t)
    nu = extract_consensus_duals(dual, tau, index)
    return ReferencePoint(dual.W_star, t, tau, nu, dual.total_power, dual)


def is_feasible(H: ChannelSet, topo: Topology, q: QosSpec,
                opts: UplinkOptions | None = None) -> bool:
    """Whether every SINR target can be met, judged by the uplink fixed point."""
    try:
        solve_uplink_fixed_point(H, topo, q, opts)
    except (InfeasibleError, DegenerateDirectionError):
        return False
    return True
