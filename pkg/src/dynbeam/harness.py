"""Tracking experiments: one ADMM iteration per channel change.

For every step ``i`` of a track the harness

1. computes the centralized optimum of ``H^[i]`` through the duality oracle,
   together with its consensus point ``(tau*, nu*)``;
2. measures ``V_i = V(nu^[i-1], tau^[i-1], H^[i])``, the Lyapunov value of the
   carried-over state against the new optimum;
3. runs exactly one ADMM step and records power, SINR, distance to the
   optimum and the two per-step bounds

    ||W - W*||_F^2 <= (1 + 1/rho) V_i
    SINR_k >= gamma_k (1 - 4 V_i / (rho sigma_k^2 + 4 V_i)).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .admm import AdmmConfig, AdmmState, LocalSolvers, admm_step, lyapunov
from .duality import reference_point
from .model import ChannelSet, QosSpec, Topology, build_consensus_index
from .tracks import TrackConfig, generate_track

BOUND_SLACK = 1e-6


def eval_sinr_bound(V_measured: float, rho: float, q: QosSpec, k: int) -> float:
    """Worst-case SINR of user ``k`` given a Lyapunov value ``V_measured``.

    Returns ``gamma_k (1 - 4V / (rho sigma_k^2 + 4V))``; equals ``gamma_k`` at
    ``V = 0`` and decays to zero as ``V`` grows.
    """
    if V_measured < 0:
        raise ValueError("Lyapunov value must be nonnegative")
    if math.isinf(V_measured):
        return 0.0
    g, s2 = float(q.gamma[k]), float(q.sigma2[k])
    return g * (1.0 - 4.0 * V_measured / (rho * s2 + 4.0 * V_measured))


def distance_bound(V_measured: float, rho: float) -> float:
    """Right-hand side ``(1 + 1/rho) V`` of the beamformer distance bound."""
    return (1.0 + 1.0 / rho) * V_measured


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenario, track model and sweep settings of one experiment."""

    topo: Topology
    q: QosSpec
    zeta: float = 0.01
    steps: int = 50
    n_tracks: int = 1
    seed: int = 0
    rhos: tuple[float, ...] = (50.0,)
    out_dir: Path | None = None
    check_bounds: bool = True
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    jobs: int = 1

    def __post_init__(self):
        if self.n_tracks < 1:
            raise ValueError("need at least one track")
        if not self.rhos:
            raise ValueError("need at least one rho")
        if any(not r > 0 for r in self.rhos):
            raise ValueError("rho values must be positive")
        if self.steps < 1:
            raise ValueError("need at least one step")

    def track_config(self, track_id: int) -> TrackConfig:
        return TrackConfig(self.topo, self.q, zeta=self.zeta, length=self.steps,
                           seed=self.seed, track_id=track_id)


@dataclass
class TrackResult:
    """Per-step metrics of one track at one ``rho``; every array has one entry per step."""

    track_id: int
    rho: float
    power_admm: np.ndarray
    power_opt: np.ndarray
    sinr: np.ndarray            # (steps, K)
    dist_W_sq: np.ndarray
    lyapunov: np.ndarray        # V_i, measured before the step
    primal_residual: np.ndarray
    bound_appA: np.ndarray      # (1 + 1/rho) V_i
    bound_eq20: np.ndarray      # (steps, K)
    # max_i ||E^T nu^[i]||_inf / max(1, ||nu^[i]||_inf)
    consensus_dual_ratio: float = 0.0

    @property
    def steps(self) -> int:
        return len(self.power_admm)

    @property
    def sinr_mean(self) -> np.ndarray:
        return self.sinr.mean(axis=1)

    def distance_violations(self, slack: float = BOUND_SLACK) -> np.ndarray:
        """Steps (0-based) where the distance bound fails."""
        tol = slack * np.maximum(1.0, self.lyapunov)
        return np.flatnonzero(self.dist_W_sq > self.bound_appA + tol)

    def sinr_bound_violations(self, q: QosSpec, slack: float = BOUND_SLACK) -> list[tuple[int, int]]:
        """``(step, user)`` pairs (0-based) where the SINR bound fails."""
        tol = slack * np.maximum(1.0, np.asarray(q.gamma))
        bad = self.sinr < self.bound_eq20 - tol[None, :]
        return [(int(i), int(k)) for i, k in zip(*np.nonzero(bad))]


def run_track(track: list[ChannelSet], topo: Topology, q: QosSpec, cfg: AdmmConfig,
              track_id: int = 0, records: list | None = None) -> TrackResult:
    """Run one ADMM iteration per channel of ``track`` from ``tau = 0, nu = 0``.

    If ``records`` is a list, every :class:`~dynbeam.admm.IterationRecord` is
    appended to it (with ``lyapunov`` set to ``V_i``).
    """
    index = build_consensus_index(topo)
    L, K = len(track), topo.n_users
    out = {name: np.zeros(L) for name in
           ("power_admm", "power_opt", "dist_W_sq", "lyapunov", "primal_residual", "bound_appA")}
    sinr = np.zeros((L, K))
    bound20 = np.zeros((L, K))
    ratio = 0.0
    state = AdmmState.zeros(index)
    rho = cfg.rho
    for i, H in enumerate(track):
        ref = reference_point(H, topo, q, index)
        V = lyapunov(state.nu, state.tau, ref.nu, ref.tau, rho, index)
        state, rec = admm_step(state, H, cfg, topo, q, LocalSolvers(H, topo, q, rho, index))
        rec.lyapunov = V
        if records is not None:
            records.append(rec)
        out["power_admm"][i] = rec.total_power
        out["power_opt"][i] = ref.power
        out["dist_W_sq"][i] = float(np.sum(np.abs(rec.W - ref.W) ** 2))
        out["lyapunov"][i] = V
        out["primal_residual"][i] = rec.primal_residual
        out["bound_appA"][i] = distance_bound(V, rho)
        sinr[i] = rec.sinr
        bound20[i] = [eval_sinr_bound(V, rho, q, k) for k in range(K)]
        if index.n_t:
            etn = np.max(np.abs(index.collect(state.nu)))
            ratio = max(ratio, etn / max(1.0, float(np.max(np.abs(state.nu)))))
    return TrackResult(track_id, rho, sinr=sinr, bound_eq20=bound20,
                       consensus_dual_ratio=ratio, **out)


def _run_one(args) -> list[TrackResult]:
    cfg, track_id = args
    track = generate_track(cfg.track_config(track_id))
    return [run_track(track, cfg.topo, cfg.q, replace(cfg.admm, rho=r), track_id)
            for r in cfg.rhos]


@dataclass
class EnsembleSummary:
    """Per-step statistics across tracks for one ``rho``."""

    rho: float
    n_tracks: int
    mean_power_admm: np.ndarray
    mean_power_opt: np.ndarray
    mean_sinr: np.ndarray        # mean over tracks and users
    std_sinr: np.ndarray         # std over tracks of the per-track user-mean SINR
    mean_sinr_user: np.ndarray   # (steps, K)
    distance_violations: int
    sinr_bound_violations: int
    consensus_dual_ratio: float

    def window(self, first: int, last: int) -> dict:
        """Averages over 1-based steps ``first..last`` inclusive."""
        s = slice(first - 1, last)
        p_admm = float(np.mean(self.mean_power_admm[s]))
        p_opt = float(np.mean(self.mean_power_opt[s]))
        return {
            "power_admm": p_admm,
            "power_opt": p_opt,
            "power_gap": (p_admm - p_opt) / p_opt,
            "sinr_mean": float(np.mean(self.mean_sinr[s])),
            "sinr_user": self.mean_sinr_user[s].mean(axis=0),
        }


def summarize(results: list[TrackResult], q: QosSpec) -> EnsembleSummary:
    """Fixed-order reduction of same-``rho`` track results."""
    results = sorted(results, key=lambda r: r.track_id)
    rho = results[0].rho
    if any(r.rho != rho for r in results):
        raise ValueError("results mix different rho values")
    pa = np.stack([r.power_admm for r in results])
    po = np.stack([r.power_opt for r in results])
    su = np.stack([r.sinr for r in results])
    per_track = su.mean(axis=2)
    return EnsembleSummary(
        rho=rho,
        n_tracks=len(results),
        mean_power_admm=pa.mean(axis=0),
        mean_power_opt=po.mean(axis=0),
        mean_sinr=per_track.mean(axis=0),
        std_sinr=per_track.std(axis=0),
        mean_sinr_user=su.mean(axis=0),
        distance_violations=sum(len(r.distance_violations()) for r in results),
        sinr_bound_violations=sum(len(r.sinr_bound_violations(q)) for r in results),
        consensus_dual_ratio=max(r.consensus_dual_ratio for r in results),
    )


def run_ensemble(cfg: ExperimentConfig) -> dict[float, tuple[EnsembleSummary, list[TrackResult]]]:
    """Run every track at every ``rho``; the same tracks are shared across ``rho``.

    Tracks are distributed over ``cfg.jobs`` processes; results do not depend
    on the worker count.  With ``cfg.out_dir`` set, one CSV per ``rho`` is
    written there.
    """
    work = [(cfg, t) for t in range(cfg.n_tracks)]
    if cfg.jobs > 1 and cfg.n_tracks > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_track = list(pool.map(_run_one, work))
    else:
        per_track = [_run_one(w) for w in work]

    out = {}
    for j, rho in enumerate(cfg.rhos):
        results = [res[j] for res in per_track]
        out[rho] = (summarize(results, cfg.q), results)
        if cfg.out_dir is not None:
            Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
            write_csv(Path(cfg.out_dir) / csv_name(rho), results)
    return out


def csv_name(rho: float) -> str:
    return f"rho_{float(rho):g}.csv"


# CSV ------------------------------------------------------------------------

def csv_header(K: int) -> list[str]:
    return (["track_id", "step", "rho", "power_admm", "power_opt"]
            + [f"sinr_user_{k + 1}" for k in range(K)]
            + ["sinr_mean", "dist_W_sq", "lyapunov", "primal_residual", "bound_appA"]
            + [f"bound_eq20_user_{k + 1}" for k in range(K)])


def write_csv(path: str | Path, results: list[TrackResult]):
    """One row per (track, step); floats use ``repr`` so they read back exactly."""
    K = results[0].sinr.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(csv_header(K))
        for r in results:
            sm = r.sinr_mean
            for i in range(r.steps):
                w.writerow([r.track_id, i + 1, repr(float(r.rho)),
                            repr(float(r.power_admm[i])), repr(float(r.power_opt[i]))]
                           + [repr(float(v)) for v in r.sinr[i]]
                           + [repr(float(sm[i])), repr(float(r.dist_W_sq[i])),
                              repr(float(r.lyapunov[i])), repr(float(r.primal_residual[i])),
                              repr(float(r.bound_appA[i]))]
                           + [repr(float(v)) for v in r.bound_eq20[i]])


def read_csv(path: str | Path) -> list[TrackResult]:
    """Inverse of :func:`write_csv` (the consensus-dual ratio is not stored)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        K = sum(1 for h in header if h.startswith("sinr_user_"))
        if header != csv_header(K):
            raise ValueError(f"{path}: unexpected header")
        rows_by_track: dict[int, list[list[str]]] = {}
        for row in reader:
            rows_by_track.setdefault(int(row[0]), []).append(row)

    results = []
    for tid, rows in rows_by_track.items():
        rows.sort(key=lambda r: int(r[1]))
        a = np.array([[float(v) for v in r[2:]] for r in rows])
        results.append(TrackResult(
            track_id=tid,
            rho=float(a[0, 0]),
            power_admm=a[:, 1].copy(),
            power_opt=a[:, 2].copy(),
            sinr=a[:, 3:3 + K].copy(),
            dist_W_sq=a[:, 4 + K].copy(),
            lyapunov=a[:, 5 + K].copy(),
            primal_residual=a[:, 6 + K].copy(),
            bound_appA=a[:, 7 + K].copy(),
            bound_eq20=a[:, 8 + K:8 + 2 * K].copy(),
        ))
    return results
