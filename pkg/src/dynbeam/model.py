"""Scenario types, SINR evaluation and the interference-copy bookkeeping.

Indices are 0-based in code.  Channels are stored as a complex array ``h`` of
shape ``(B, K, N_T)`` with ``h[m, k]`` the channel from base station ``m`` to
user ``k``; beamformers as a complex array ``W`` of shape ``(K, N_T)``.

Every cross pair ``(m, k)`` with ``m != b(k)`` owns one consistency slot in
``tau`` and two slots in ``t``: the owner copy held by base station ``m``
(interference it causes) and the sufferer copy held by ``b(k)``.  The 0/1
matrix ``E`` maps ``tau`` to ``t``; it is never applied as a dense product in
the hot paths, only through the index arrays of :class:`ConsensusIndex`.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class DimensionError(ValueError):
    """Array shapes disagree with the topology."""


class MissingCopyError(KeyError):
    """A local interference copy needed by a base station is absent."""


@dataclass(frozen=True)
class Topology:
    """Base stations, users, antennas and the serving assignment ``b(k)``."""

    n_bs: int
    n_users: int
    n_tx: int
    assign: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assign", tuple(int(b) for b in self.assign))
        if self.n_bs < 1 or self.n_users < 1 or self.n_tx < 1:
            raise ValueError("n_bs, n_users and n_tx must all be >= 1")
        if len(self.assign) != self.n_users:
            raise DimensionError(
                f"assignment has {len(self.assign)} entries for {self.n_users} users")
        if any(b < 0 or b >= self.n_bs for b in self.assign):
            raise ValueError("assignment refers to a nonexistent base station")

    @classmethod
    def uniform(cls, n_bs: int, users_per_bs: int, n_tx: int) -> Topology:
        """Users ``b*U .. b*U+U-1`` served by base station ``b``."""
        assign = tuple(b for b in range(n_bs) for _ in range(users_per_bs))
        return cls(n_bs, n_bs * users_per_bs, n_tx, assign)

    @cached_property
    def served(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(k for k, b in enumerate(self.assign) if b == m)
                     for m in range(self.n_bs))


@dataclass(frozen=True)
class QosSpec:
    """Per-user SINR targets ``gamma`` (linear) and noise variances ``sigma2``."""

    gamma: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float).ravel()
        sigma2 = np.array(self.sigma2, dtype=float).ravel()
        if gamma.shape != sigma2.shape:
            raise DimensionError("gamma and sigma2 differ in length")
        if np.any(gamma <= 0) or np.any(sigma2 <= 0):
            raise ValueError("SINR targets and noise variances must be positive")
        gamma.flags.writeable = False
        sigma2.flags.writeable = False
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sigma2", sigma2)

    @classmethod
    def uniform(cls, n_users: int, gamma: float, sigma2: float) -> QosSpec:
        return cls(np.full(n_users, gamma), np.full(n_users, sigma2))

    def __len__(self):
        return self.gamma.size


@dataclass(frozen=True)
class ChannelSet:
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 3:
            raise DimensionError("channels must have shape (B, K, N_T)")
        if not np.all(np.isfinite(h)):
            raise ValueError("non-finite channel entries")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)

    @property
    def shape(self):
        return self.h.shape

    def check(self, topo: Topology):
        if self.h.shape != (topo.n_bs, topo.n_users, topo.n_tx):
            raise DimensionError(
                f"channel shape {self.h.shape} does not match topology "
                f"({topo.n_bs}, {topo.n_users}, {topo.n_tx})")

    def scaled(self, alpha: float) -> ChannelSet:
        return ChannelSet(alpha * self.h)

    def __eq__(self, other):
        return isinstance(other, ChannelSet) and np.array_equal(self.h, other.h)

    __hash__ = None


def _check_w(W: np.ndarray, topo: Topology) -> np.ndarray:
    W = np.asarray(W)
    if W.shape != (topo.n_users, topo.n_tx):
        raise DimensionError(
            f"beamformers have shape {W.shape}, expected ({topo.n_users}, {topo.n_tx})")
    return W


def gain_matrix(W: np.ndarray, H: ChannelSet, topo: Topology) -> np.ndarray:
    """``G[k, i] = |h_{b(i)k}^H w_i|^2``: power of user i's stream at user k."""
    W = _check_w(W, topo)
    H.check(topo)
    serving = H.h[list(topo.assign)]          # (K_i, K_k, N): h_{b(i) k}
    amp = np.einsum("ikn,in->ki", serving.conj(), W)
    return np.abs(amp) ** 2


def sinr_all(W: np.ndarray, H: ChannelSet, topo: Topology, q: QosSpec) -> np.ndarray:
    """SINR of every user under beamformers ``W``."""
    G = gain_matrix(W, H, topo)
    signal = np.diag(G).copy()
    interference = G.sum(axis=1) - signal
    return signal / (interference + q.sigma2)


def compute_sinr(W: np.ndarray, H: ChannelSet, topo: Topology, q: QosSpec, k: int) -> float:
    return float(sinr_all(W, H, topo, q)[k])


def intercell_interference(W: np.ndarray, H: ChannelSet, topo: Topology,
                           m: int, k: int) -> float:
    """Power received at user ``k`` from all streams of base station ``m``."""
    amp = H.h[m, k].conj() @ np.asarray(W)[list(topo.served[m])].T
    return float(np.sum(np.abs(amp) ** 2))


def total_power(W: np.ndarray) -> float:
    return float(np.sum(np.abs(W) ** 2))


@dataclass(frozen=True)
class ConsensusIndex:
    """Ordering of interference copies and consistency variables.

    Attributes
    ----------
    pairs : tuple of (m, k)
        Cross pairs with ``m != b(k)`` in lexicographic order; entry ``p`` is
        the slot of ``tau``.
    rows : tuple of (b, (m, k))
        One entry per slot of ``t``, grouped by holding base station ``b``
        and lexicographic in ``(m, k)`` inside each group.
    owner_row, sufferer_row : ndarray
        Position in ``t`` of the two copies of each pair.
    pair_of_row : ndarray
        Column of ``E`` carrying the single 1 of each row.
    """

    topo: Topology
    pairs: tuple[tuple[int, int], ...]
    rows: tuple[tuple[int, tuple[int, int]], ...]
    owner_row: np.ndarray
    sufferer_row: np.ndarray
    pair_of_row: np.ndarray
    block: tuple[slice, ...]

    @property
    def n_tau(self) -> int:
        return len(self.pairs)

    @property
    def n_t(self) -> int:
        return len(self.rows)

    def block_pairs(self, b: int) -> list[tuple[int, int]]:
        """The ``(m, k)`` labels of ``t_b`` in order."""
        return [pair for _, pair in self.rows[self.block[b]]]

    @cached_property
    def E(self) -> np.ndarray:
        E = np.zeros((self.n_t, self.n_tau))
        E[np.arange(self.n_t), self.pair_of_row] = 1.0
        return E

    def expand(self, tau: np.ndarray) -> np.ndarray:
        """``E tau``."""
        return np.asarray(tau)[self.pair_of_row]

    def collect(self, t: np.ndarray) -> np.ndarray:
        """``E^T t``: sum of the two copies of every pair."""
        t = np.asarray(t)
        return t[self.owner_row] + t[self.sufferer_row]

    def average(self, t: np.ndarray) -> np.ndarray:
        """``E^+ t = E^T t / 2``."""
        t = np.asarray(t)
        return 0.5 * (t[self.owner_row] + t[self.sufferer_row])


def build_consensus_index(topo: Topology) -> ConsensusIndex:
    pairs = tuple((m, k) for m in range(topo.n_bs) for k in range(topo.n_users)
                  if m != topo.assign[k])
    pos = {pair: p for p, pair in enumerate(pairs)}
    rows = []
    block = []
    for b in range(topo.n_bs):
        start = len(rows)
        mine = [pair for pair in pairs if pair[0] == b or topo.assign[pair[1]] == b]
        rows.extend((b, pair) for pair in sorted(mine))
        block.append(slice(start, len(rows)))
    owner = np.zeros(len(pairs), dtype=int)
    sufferer = np.zeros(len(pairs), dtype=int)
    pair_of_row = np.zeros(len(rows), dtype=int)
    for r, (b, pair) in enumerate(rows):
        p = pos[pair]
        pair_of_row[r] = p
        if b == pair[0]:
            owner[p] = r
        else:
            sufferer[p] = r
    for arr in (owner, sufferer, pair_of_row):
        arr.flags.writeable = False
    return ConsensusIndex(topo, pairs, tuple(rows), owner, sufferer, pair_of_row,
                          tuple(block))


def true_copies(W: np.ndarray, H: ChannelSet, index: ConsensusIndex) -> np.ndarray:
    """Vector ``t`` with every copy set to the actual intercell interference amplitude."""
    topo = index.topo
    vals = np.array([np.sqrt(intercell_interference(W, H, topo, m, k))
                     for m, k in index.pairs])
    return index.expand(vals) if vals.size else np.zeros(0)


def compute_local_sinr(W: np.ndarray, H: ChannelSet, t_b: Mapping | Sequence | np.ndarray,
                       topo: Topology, q: QosSpec, k: int,
                       index: ConsensusIndex | None = None) -> float:
    """SINR of user ``k`` as seen by its serving base station.

    Intercell interference is replaced by the squared local copies
    ``t_b[(m, k)]`` for ``m != b(k)``.  ``t_b`` is either a mapping keyed by
    ``(m, k)`` or the block vector of base station ``b(k)`` ordered as in
    ``index``.
    """
    b = topo.assign[k]
    if not isinstance(t_b, Mapping):
        if index is None:
            index = build_consensus_index(topo)
        labels = index.block_pairs(b)
        vec = np.asarray(t_b, dtype=float)
        if vec.shape != (len(labels),):
            raise DimensionError(
                f"t_b has {vec.size} entries, base station {b} holds {len(labels)}")
        t_b = dict(zip(labels, vec))
    W = _check_w(W, topo)
    hk = H.h[b, k]
    own = np.abs(hk.conj() @ W[list(topo.served[b])].T) ** 2
    signal = np.abs(hk.conj() @ W[k]) ** 2
    intra = own.sum() - signal
    inter = 0.0
    for m in range(topo.n_bs):
        if m == b:
            continue
        if (m, k) not in t_b:
            raise MissingCopyError((m, k))
        inter += float(t_b[(m, k)]) ** 2
    return float(signal / (intra + inter + q.sigma2[k]))
