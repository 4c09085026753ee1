"""Seeded AR(1) channel tracks.

Every entry is circularly symmetric complex Gaussian with unit variance
(variance 1/2 per real component).  A track evolves as

    H_i = sqrt(zeta) H_inn + sqrt(1 - zeta) H_{i-1}

which keeps the stationary second moment at 1.  A draw that leaves the
targets infeasible is discarded and only the innovation is redrawn.

Random streams: PCG64 seeded by ``SeedSequence(seed, spawn_key=(track, step))``
with step 0 for the initial channel, so every (track, step) pair has its own
stream and tracks can be generated in any order or in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .duality import UplinkOptions, is_feasible
from .model import ChannelSet, QosSpec, Topology


class TrackGenerationError(RuntimeError):
    """No feasible channel found within the rejection budget."""


@dataclass(frozen=True)
class TrackConfig:
    topo: Topology
    q: QosSpec
    zeta: float = 0.01
    length: int = 50
    seed: int = 0
    track_id: int = 0
    max_rejections: int = 1000
    check_feasibility: bool = True

    def __post_init__(self):
        if not 0.0 <= self.zeta <= 1.0:
            raise ValueError("zeta must lie in [0, 1]")
        if self.length < 1:
            raise ValueError("track length must be >= 1")


def stream(seed: int, track: int, step: int) -> np.random.Generator:
    """The generator owning draws for ``(track, step)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(track, step))))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circular complex Gaussian entries."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def _shape(topo: Topology):
    return (topo.n_bs, topo.n_users, topo.n_tx)


def sample_initial(topo: Topology, seed: int, track: int = 0) -> ChannelSet:
    """One unconstrained draw from the stationary distribution."""
    return ChannelSet(complex_gaussian(stream(seed, track, 0), _shape(topo)))


def ar1_update(H_prev: np.ndarray, H_inn: np.ndarray, zeta: float) -> np.ndarray:
    return np.sqrt(zeta) * H_inn + np.sqrt(1.0 - zeta) * H_prev


def increment_second_moment(n_entries: int, zeta: float) -> float:
    """``E ||H_i - H_{i-1}||^2`` for a stationary unrejected update.

    ``H_i - H_{i-1} = sqrt(zeta) H_inn - (1 - sqrt(1 - zeta)) H_{i-1}`` with the
    two terms independent and unit variance per entry.
    """
    return n_entries * (zeta + (1.0 - np.sqrt(1.0 - zeta)) ** 2)


def _feasible(H: ChannelSet, cfg: TrackConfig) -> bool:
    return not cfg.check_feasibility or is_feasible(H, cfg.topo, cfg.q, UplinkOptions())


def step(H_prev: ChannelSet, cfg: TrackConfig, rng: np.random.Generator) -> ChannelSet:
    """Next channel of the track, redrawing the innovation until feasible."""
    shape = _shape(cfg.topo)
    for _ in range(cfg.max_rejections + 1):
        H = ChannelSet(ar1_update(H_prev.h, complex_gaussian(rng, shape), cfg.zeta))
        if _feasible(H, cfg):
            return H
    raise TrackGenerationError(
        f"no feasible channel after {cfg.max_rejections} redraws (zeta={cfg.zeta})")


def generate_track(cfg: TrackConfig) -> list[ChannelSet]:
    """A feasible track of ``cfg.length`` channels, fully determined by seed and track id."""
    rng = stream(cfg.seed, cfg.track_id, 0)
    shape = _shape(cfg.topo)
    for _ in range(cfg.max_rejections + 1):
        H = ChannelSet(complex_gaussian(rng, shape))
        if _feasible(H, cfg):
            break
    else:
        raise TrackGenerationError("no feasible initial channel")
    track = [H]
    for i in range(1, cfg.length):
        track.append(step(track[-1], cfg, stream(cfg.seed, cfg.track_id, i)))
    return track
