"""Consensus ADMM over base stations.

Each iteration every base station solves its local cone program against the
previous consistency vector ``tau`` and its own block of multipliers ``nu``,
the stations swap their interference copies, ``tau`` becomes the average of
the two copies of each pair and the multipliers take a dual ascent step.
Local solves are sequential here; nothing in a step depends on the order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .builders import LocalTemplate
from .model import ChannelSet, ConsensusIndex, QosSpec, Topology, build_consensus_index, sinr_all
from .socp import SolverOptions, SolveStatus, solve

DECREASE_SLACK = 1e-6


class AdmmError(RuntimeError):
    pass


class LocalSolveError(AdmmError):
    """A base station's subproblem failed."""

    def __init__(self, b: int, status: SolveStatus, detail: str = ""):
        super().__init__(f"subproblem of base station {b + 1} ended with {status.value}"
                         + (f": {detail}" if detail else ""))
        self.bs = b
        self.status = status


class AdmmTimeout(AdmmError):
    """``solve_static`` hit its iteration cap; ``best`` is the last iterate."""

    def __init__(self, iterations: int, best: StaticResult):
        super().__init__(f"ADMM did not converge in {iterations} iterations")
        self.iterations = iterations
        self.best = best


@dataclass(frozen=True)
class AdmmConfig:
    rho: float = 50.0
    inner_tol: float = 1e-10
    max_static_iters: int = 2000
    convergence_eps: float = 1e-8
    # accept a subproblem that stops at the iteration cap if its residuals are below this
    inner_accept: float = 1e-5

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass
class AdmmState:
    """Consistency vector and multipliers carried between iterations."""

    tau: np.ndarray
    nu: np.ndarray
    i: int = 0

    @classmethod
    def zeros(cls, index: ConsensusIndex) -> AdmmState:
        return cls(np.zeros(index.n_tau), np.zeros(index.n_t))


@dataclass
class IterationRecord:
    i: int
    W: np.ndarray
    t: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    primal_residual: float
    dual_change: float
    sinr: np.ndarray
    total_power: float
    lyapunov: float | None = None
    inner_status: tuple[str, ...] = ()
    # ||t^[i] - E tau^[i]||, the residual after averaging
    consensus_gap: float = 0.0


class LocalSolvers:
    """Per-station templates for one channel realization."""

    def __init__(self, H: ChannelSet, topo: Topology, q: QosSpec, rho: float,
                 index: ConsensusIndex | None = None):
        self.H = H
        self.topo = topo
        self.q = q
        self.rho = float(rho)
        self.index = index if index is not None else build_consensus_index(topo)
        self.templates = [LocalTemplate(b, H, topo, q, rho, self.index)
                          for b in range(topo.n_bs)]


def admm_step(state: AdmmState, H: ChannelSet, cfg: AdmmConfig, topo: Topology, q: QosSpec,
              solvers: LocalSolvers | None = None) -> tuple[AdmmState, IterationRecord]:
    """One iteration: local solves, copy exchange, averaging, dual update."""
    if solvers is None or solvers.H is not H or solvers.rho != cfg.rho:
        solvers = LocalSolvers(H, topo, q, cfg.rho)
    index = solvers.index
    rho = cfg.rho
    Etau = index.expand(state.tau)
    opts = SolverOptions(tol=cfg.inner_tol)

    W = np.zeros((topo.n_users, topo.n_tx), dtype=complex)
    t = np.zeros(index.n_t)
    statuses = []
    for b, tmpl in enumerate(solvers.templates):
        blk = index.block[b]
        y = Etau[blk] - state.nu[blk] / rho
        rep = solve(tmpl.program(y), opts)
        if not rep.optimal:
            if rep.status is SolveStatus.INFEASIBLE or max(rep.residuals) > cfg.inner_accept:
                raise LocalSolveError(b, rep.status, f"residuals {rep.residuals}")
        statuses.append(rep.status.value)
        W[list(tmpl.vmap.users)] = tmpl.vmap.beamformers(rep.x)
        t[blk] = tmpl.vmap.copies(rep.x)

    # exchange and average: tau^[i] = E^+ t^[i]
    tau = index.average(t)
    Etau_new = index.expand(tau)
    nu = state.nu + rho * (t - Etau_new)

    rec = IterationRecord(
        i=state.i + 1,
        W=W,
        t=t,
        tau=tau,
        nu=nu,
        primal_residual=float(np.linalg.norm(t - Etau)),
        dual_change=float(np.linalg.norm(Etau_new - Etau)),
        sinr=sinr_all(W, H, topo, q),
        total_power=float(np.sum(np.abs(W) ** 2)),
        inner_status=tuple(statuses),
        consensus_gap=float(np.linalg.norm(t - Etau_new)),
    )
    return AdmmState(tau, nu, state.i + 1), rec


def lyapunov(nu, tau, nu_star, tau_star, rho: float, E) -> float:
    """``(1/rho) ||nu - nu*||^2 + rho ||E (tau - tau*)||^2``.

    ``E`` may be the dense matrix or a :class:`ConsensusIndex`.
    """
    dtau = np.asarray(tau, float) - np.asarray(tau_star, float)
    Ed = E.expand(dtau) if isinstance(E, ConsensusIndex) else np.asarray(E) @ dtau
    dnu = np.asarray(nu, float) - np.asarray(nu_star, float)
    return float(dnu @ dnu / rho + rho * (Ed @ Ed))


def decrease_margin(prev_V: float, record: IterationRecord, rho: float) -> float:
    """``V_prev - rho ||r||^2 - rho ||E dtau||^2 - V`` (nonnegative when the decrease holds)."""
    if record.lyapunov is None:
        raise ValueError("record carries no Lyapunov value")
    return (prev_V - rho * record.primal_residual ** 2 - rho * record.dual_change ** 2
            - record.lyapunov)


def check_decrease(prev_V: float, record: IterationRecord, rho: float,
                   slack: float = DECREASE_SLACK) -> bool:
    """Whether the Lyapunov value fell by at least the residual terms, up to ``slack * max(1, V)``."""
    return decrease_margin(prev_V, record, rho) >= -slack * max(1.0, prev_V)


def e_transpose_nu(nu: np.ndarray, index: ConsensusIndex) -> np.ndarray:
    return index.collect(nu)


@dataclass
class StaticResult:
    W: np.ndarray
    t: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    history: list[IterationRecord] = field(default_factory=list)
    converged: bool = False


def solve_static(H: ChannelSet, topo: Topology, q: QosSpec, cfg: AdmmConfig,
                 state: AdmmState | None = None, reference=None,
                 keep_history: bool = True) -> StaticResult:
    """Iterate on a fixed channel until both residuals fall below ``cfg.convergence_eps``.

    Stops when ``max(||t - E tau_prev||, rho ||E dtau||) <= convergence_eps``.
    If ``reference`` (any object with ``tau`` and ``nu``) is given, each
    record carries its Lyapunov value.

    Raises
    ------
    AdmmTimeout
        After ``cfg.max_static_iters`` iterations, carrying the last iterate.
    """
    solvers = LocalSolvers(H, topo, q, cfg.rho)
    index = solvers.index
    state = state if state is not None else AdmmState.zeros(index)
    history = []
    rec = None
    for _ in range(cfg.max_static_iters):
        state, rec = admm_step(state, H, cfg, topo, q, solvers)
        if reference is not None:
            rec.lyapunov = lyapunov(state.nu, state.tau, reference.nu, reference.tau, cfg.rho, index)
        if keep_history:
            history.append(rec)
        if max(rec.primal_residual, cfg.rho * rec.dual_change) <= cfg.convergence_eps:
            return StaticResult(rec.W, rec.t, state.tau, state.nu, history, True)
    best = StaticResult(rec.W, rec.t, state.tau, state.nu, history, False) if rec else None
    raise AdmmTimeout(cfg.max_static_iters, best)


def with_rho(cfg: AdmmConfig, rho: float) -> AdmmConfig:
    return replace(cfg, rho=rho)
