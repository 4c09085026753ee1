"""Cone programs for the centralized beamforming problem and the per-base-station subproblem.

Realification: a complex vector ``v`` becomes ``[Re v; Im v]``.  For a channel
``h = p + iq`` and beamformer ``w = a + ib``

    Re(h^H w) = [p; q] . [a; b]        Im(h^H w) = [-q; p] . [a; b]

Each SINR constraint uses the phase-fixed rotation

    sqrt(1 + 1/gamma_k) Re(h_{b(k)k}^H w_k) >= || [ (h_{b(i)k}^H w_i)_i ; sigma_k ] ||
    Im(h_{b(k)k}^H w_k) = 0

where the norm runs over every stream ``i`` including ``k`` itself; moving
the own-signal term to the right-hand side is what turns the
``1/gamma`` factor into ``1 + 1/gamma``.  A quadratic objective
``||x||^2`` becomes an epigraph variable ``P`` with the rotated cone

    || [2 sqrt(c) x ; P - c] || <= P + c     <=>     P >= ||x||^2

for any ``c > 0``.  ``c = 1`` is the textbook form; choosing ``c`` near the
optimal value keeps both sides of the cone on one scale, which is worth a
couple of digits of accuracy in ``x`` when the power is in the hundreds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelSet, ConsensusIndex, QosSpec, Topology, build_consensus_index
from .socp import ConeProgram, NonNeg, SecondOrder, Zero


class ZeroChannelError(ValueError):
    """A user's direct channel is identically zero, so no SINR target is reachable."""

    def __init__(self, k: int):
        super().__init__(f"direct channel of user {k + 1} is zero")
        self.user = k


def _re_im_rows(h: np.ndarray):
    """Real row vectors giving Re(h^H w) and Im(h^H w) on ``[Re w; Im w]``."""
    p, q = h.real, h.imag
    return np.concatenate([p, q]), np.concatenate([-q, p])


def _check_direct(H: ChannelSet, topo: Topology, users):
    for k in users:
        if not np.any(H.h[topo.assign[k], k]):
            raise ZeroChannelError(k)


@dataclass(frozen=True)
class VariableMap:
    """Where each modelling variable lives in the solver's ``x``.

    ``users[j]`` is the user whose beamformer occupies columns
    ``w_start + 2*N_T*j`` onwards; ``t`` is the slice of interference copies
    (empty for the centralized problem); ``epi`` the epigraph variable.
    """

    users: tuple[int, ...]
    n_tx: int
    t: slice
    epi: int

    def w_cols(self, j: int) -> slice:
        n2 = 2 * self.n_tx
        return slice(n2 * j, n2 * (j + 1))

    def beamformers(self, x: np.ndarray) -> np.ndarray:
        """Complex beamformers, one row per entry of ``users``."""
        n = self.n_tx
        w = np.asarray(x[: 2 * n * len(self.users)]).reshape(len(self.users), 2 * n)
        return w[:, :n] + 1j * w[:, n:]

    def copies(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x[self.t]).copy()


class _Rows:
    """Accumulates cone rows of ``b - A x in K``."""

    def __init__(self, n: int):
        self.n = n
        self.A: list[np.ndarray] = []
        self.b: list[np.ndarray] = []
        self.cones = []

    def add(self, cone, A: np.ndarray, b: np.ndarray | None = None):
        A = np.atleast_2d(A)
        self.A.append(A)
        self.b.append(np.zeros(A.shape[0]) if b is None else np.asarray(b, float))
        self.cones.append(cone)

    def build(self, c: np.ndarray) -> ConeProgram:
        return ConeProgram(c, np.vstack(self.A), np.concatenate(self.b), tuple(self.cones))


def power_scale(H: ChannelSet, topo: Topology, q: QosSpec, users) -> float:
    """Interference-free power ``sum_k gamma_k sigma_k^2 / ||h_{b(k)k}||^2``, a lower bound."""
    tot = 0.0
    for k in users:
        tot += q.gamma[k] * q.sigma2[k] / np.sum(np.abs(H.h[topo.assign[k], k]) ** 2)
    return max(1.0, tot)


def _epigraph(rows: _Rows, n: int, epi: int, X: np.ndarray, scale: float) -> int:
    """Add ``P >= ||X x - y||^2`` (``y`` supplied later through ``b``); return the row of X's block."""
    k = X.shape[0]
    A = np.zeros((k + 2, n))
    b = np.zeros(k + 2)
    A[0, epi] = -1.0
    b[0] = scale
    A[1:k + 1] = -2.0 * np.sqrt(scale) * X
    A[-1, epi] = -1.0
    b[-1] = -scale
    start = sum(a.shape[0] for a in rows.A) + 1
    rows.add(SecondOrder(k + 2), A, b)
    return start


def _amp_rows(h: np.ndarray, col: slice, n: int) -> np.ndarray:
    """Two rows of -[Re; Im](h^H w) on the columns of ``w`` (slack sign convention)."""
    re, im = _re_im_rows(h)
    out = np.zeros((2, n))
    out[0, col] = -re
    out[1, col] = -im
    return out


def build_centralized(H: ChannelSet, topo: Topology, q: QosSpec) -> tuple[ConeProgram, VariableMap]:
    """Minimum total power subject to every user's SINR target, as one cone program."""
    H.check(topo)
    K, N = topo.n_users, topo.n_tx
    _check_direct(H, topo, range(K))
    n2 = 2 * N
    nw = K * n2
    n = nw + 1
    vmap = VariableMap(tuple(range(K)), N, slice(nw, nw), nw)
    rows = _Rows(n)

    for k in range(K):
        hk = H.h[topo.assign[k], k]
        re, im = _re_im_rows(hk)
        zrow = np.zeros(n)
        zrow[vmap.w_cols(k)] = -im
        rows.add(Zero(1), zrow)

        A = np.zeros((2 + 2 * K, n))
        b = np.zeros(2 + 2 * K)
        A[0, vmap.w_cols(k)] = -np.sqrt(1.0 + 1.0 / q.gamma[k]) * re
        for i in range(K):
            A[1 + 2 * i:3 + 2 * i] = _amp_rows(H.h[topo.assign[i], k], vmap.w_cols(i), n)
        b[-1] = np.sqrt(q.sigma2[k])
        rows.add(SecondOrder(A.shape[0]), A, b)

    X = np.zeros((nw, n))
    X[:, :nw] = np.eye(nw)
    _epigraph(rows, n, vmap.epi, X, power_scale(H, topo, q, range(K)))

    c = np.zeros(n)
    c[vmap.epi] = 1.0
    return rows.build(c), vmap


class LocalTemplate:
    """Constraint structure of one base station's subproblem for a fixed channel.

    Only the constant vector depends on ``y_b = E_b tau - nu_b / rho``, so a
    template is built once per channel realization and reused across
    iterations.
    """

    def __init__(self, b: int, H: ChannelSet, topo: Topology, q: QosSpec, rho: float,
                 index: ConsensusIndex | None = None):
        if not rho > 0:
            raise ValueError("rho must be positive")
        H.check(topo)
        self.index = index if index is not None else build_consensus_index(topo)
        self.b = b
        self.rho = float(rho)
        users = topo.served[b]
        _check_direct(H, topo, users)
        labels = self.index.block_pairs(b)
        self.labels = labels
        N = topo.n_tx
        n2 = 2 * N
        U = len(users)
        nw = U * n2
        nt = len(labels)
        n = nw + nt + 1
        self.vmap = VariableMap(tuple(users), N, slice(nw, nw + nt), nw + nt)
        vmap = self.vmap
        slot = {pair: nw + r for r, pair in enumerate(labels)}
        rows = _Rows(n)

        for j, k in enumerate(users):
            hk = H.h[b, k]
            re, im = _re_im_rows(hk)
            zrow = np.zeros(n)
            zrow[vmap.w_cols(j)] = -im
            rows.add(Zero(1), zrow)

            others = [m for m in range(topo.n_bs) if m != b]
            size = 1 + 2 * U + len(others) + 1
            A = np.zeros((size, n))
            cvec = np.zeros(size)
            A[0, vmap.w_cols(j)] = -np.sqrt(1.0 + 1.0 / q.gamma[k]) * re
            for jj in range(U):
                A[1 + 2 * jj:3 + 2 * jj] = _amp_rows(hk, vmap.w_cols(jj), n)
            for r, m in enumerate(others):
                A[1 + 2 * U + r, slot[(m, k)]] = -1.0
            cvec[-1] = np.sqrt(q.sigma2[k])
            rows.add(SecondOrder(size), A, cvec)

        # caused interference: t_bj >= ||(h_bj^H w_i)_{i in U(b)}||
        for (m, k) in labels:
            if m != b:
                continue
            A = np.zeros((1 + 2 * U, n))
            A[0, slot[(m, k)]] = -1.0
            for jj in range(U):
                A[1 + 2 * jj:3 + 2 * jj] = _amp_rows(H.h[b, k], vmap.w_cols(jj), n)
            rows.add(SecondOrder(A.shape[0]), A)

        if nt:
            A = np.zeros((nt, n))
            A[:, vmap.t] = -np.eye(nt)
            rows.add(NonNeg(nt), A)

        # P >= ||w||^2 + (rho/2) ||t - y||^2
        X = np.zeros((nw + nt, n))
        X[:nw, :nw] = np.eye(nw)
        X[nw:, vmap.t] = np.sqrt(0.5 * self.rho) * np.eye(nt)
        self.scale = power_scale(H, topo, q, users)
        start = _epigraph(rows, n, vmap.epi, X, self.scale)
        self._epi_rows = (start - 1, slice(start, start + nw + nt), start + nw + nt)
        self._X = X
        self._y_rows = slice(start + nw, start + nw + nt)

        c = np.zeros(n)
        c[vmap.epi] = 1.0
        self._prog = rows.build(c)

    def program(self, y: np.ndarray) -> ConeProgram:
        """The subproblem for target ``y_b`` (length of this station's copy block)."""
        y = np.asarray(y, dtype=float)
        if y.shape != (len(self.labels),):
            raise ValueError(f"y_b must have {len(self.labels)} entries")
        # keep the epigraph balanced when the penalty term dominates the power
        c = max(self.scale, 0.5 * self.rho * float(y @ y))
        A = self._prog.A
        bvec = self._prog.b.copy()
        head, body, tail = self._epi_rows
        if c != self.scale:
            A = A.copy()
            A[body] = -2.0 * np.sqrt(c) * self._X
            bvec[head] = c
            bvec[tail] = -c
        # the target enters as -2 sqrt(c) sqrt(rho/2) y
        bvec[self._y_rows] = -2.0 * np.sqrt(c) * np.sqrt(0.5 * self.rho) * y
        return ConeProgram(self._prog.c, A, bvec, self._prog.cones)


def build_local(b: int, H: ChannelSet, topo: Topology, q: QosSpec, tau_prev: np.ndarray,
                nu_b_prev: np.ndarray, rho: float,
                index: ConsensusIndex | None = None) -> tuple[ConeProgram, VariableMap]:
    """Subproblem of base station ``b`` given the previous consensus state.

    Parameters
    ----------
    tau_prev : ndarray
        Full consistency vector from the previous iteration.
    nu_b_prev : ndarray
        Multipliers of this station's copy block.
    """
    tmpl = LocalTemplate(b, H, topo, q, rho, index)
    idx = tmpl.index
    y = idx.expand(tau_prev)[idx.block[b]] - np.asarray(nu_b_prev, float) / rho
    return tmpl.program(y), tmpl.vmap
