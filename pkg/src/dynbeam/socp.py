"""Second-order cone programs: data structures and a primal-dual interior-point solver.

Programs are stated in the form

    minimize    c^T x
    subject to  b - A x = s,   s in K = K_1 x ... x K_r

where every block ``K_i`` is a zero cone (equality rows), a nonnegative
orthant, or a second-order cone ``{(u0, u1) : u0 >= ||u1||}``.  The dual is

    maximize    -b^T y
    subject to  A^T y + c = 0,   y in K*.

The solver runs Mehrotra predictor-corrector steps on the homogeneous
self-dual embedding with Nesterov-Todd scaling, so infeasible and unbounded
problems terminate with a certificate instead of stalling.  It is written for
small dense problems (a few hundred variables at most).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla


class ConeProgramError(ValueError):
    """Malformed or non-finite cone program data."""


@dataclass(frozen=True)
class Cone:
    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("zero", "nonneg", "soc"):
            raise ConeProgramError(f"unknown cone kind {self.kind!r}")
        if self.size < 1:
            raise ConeProgramError("cone size must be positive")


def Zero(n: int) -> Cone:
    return Cone("zero", n)


def NonNeg(n: int) -> Cone:
    return Cone("nonneg", n)


def SecondOrder(n: int) -> Cone:
    return Cone("soc", n)


@dataclass(frozen=True)
class ConeProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cones: tuple[Cone, ...]

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "cones", tuple(self.cones))
        if A.shape != (b.size, c.size):
            raise ConeProgramError(
                f"A has shape {A.shape}, expected ({b.size}, {c.size})")
        if sum(k.size for k in self.cones) != b.size:
            raise ConeProgramError("cone sizes do not partition the rows of A")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    def check_finite(self):
        for name in ("c", "A", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ConeProgramError(f"non-finite entries in {name}")


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    max_iters: int = 200
    step_fraction: float = 0.99
    refine: int = 2


@dataclass
class SolveReport:
    """Solver output.

    ``y`` is the dual vector for all rows of ``A`` in their original order.
    For an ``INFEASIBLE`` report, ``certificate`` holds ``y`` normalized so
    that ``b^T y = -1`` with ``A^T y ~ 0`` and ``y in K*``; for ``UNBOUNDED``
    it holds a primal ray ``x`` with ``c^T x = -1``.
    """

    status: SolveStatus
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    objective: float
    iterations: int
    residuals: tuple[float, float, float]
    certificate: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


# ---------------------------------------------------------------------------
# cone algebra on the inequality part (nonnegative block first, then SOCs)


class _Cones:
    """Layout of the inequality rows: ``nl`` orthant rows, then SOC blocks.

    All operations are vectorized over blocks and accept either vectors of
    length ``m`` or matrices with ``m`` rows.
    """

    def __init__(self, nl: int, soc_dims: list[int]):
        self.nl = nl
        dims = np.asarray(soc_dims, dtype=int)
        self.nsoc = dims.size
        self.starts = nl + np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(int) if dims.size else np.zeros(0, int)
        self.m = nl + int(dims.sum())
        self.degree = nl + dims.size
        self._rel = self.starts - nl
        self.blk = np.repeat(np.arange(dims.size), dims)
        self.tail = np.ones(self.m - nl, dtype=bool)
        self.tail[self._rel] = False
        e = np.zeros(self.m)
        e[:nl] = 1.0
        e[self.starts] = 1.0
        self.e = e
        # J = diag(1, -1, ..., -1) on each SOC block
        self.j = np.where(self.tail, -1.0, 1.0)

    def _seg(self, v):
        return np.add.reduceat(v, self._rel, axis=0)

    def _soc_parts(self, u):
        """Heads and squared tail norms of every SOC block."""
        us = u[self.nl:]
        head = us[self._rel]
        return head, self._seg(us * us) - head * head

    def max_step(self, u, d):
        """Largest alpha >= 0 with u + alpha * d in the cone (inf if unbounded)."""
        return self.max_step2(u, d, None, None)

    def max_step2(self, u, d, v, e):
        """``min(max_step(u, d), max_step(v, e))`` in one pass (``v`` may be None)."""
        nl = self.nl
        alpha = np.inf
        if v is not None:
            un = np.concatenate([u[:nl], v[:nl]])
            dn = np.concatenate([d[:nl], e[:nl]])
        else:
            un, dn = u[:nl], d[:nl]
        if nl:
            neg = dn < 0
            if np.any(neg):
                alpha = float(np.min(-un[neg] / dn[neg]))
        if self.nsoc:
            if v is not None:
                us = np.stack([u[nl:], v[nl:]], axis=1)
                ds = np.stack([d[nl:], e[nl:]], axis=1)
            else:
                us, ds = u[nl:], d[nl:]
            u0, d0 = us[self._rel], ds[self._rel]
            tu = self._seg(np.where(self._tail_col(us), us * us, 0.0))
            td = self._seg(np.where(self._tail_col(us), ds * ds, 0.0))
            tud = self._seg(np.where(self._tail_col(us), us * ds, 0.0))
            qc = (u0 - np.sqrt(tu)) * (u0 + np.sqrt(tu))
            qa = d0 * d0 - td
            qb = 2.0 * (u0 * d0 - tud)
            alpha = min(alpha, _soc_steps(qa, qb, qc))
        return alpha

    def _tail_col(self, u):
        return self.tail if u.ndim == 1 else self.tail[:, None]

    def shift_to_interior(self, u):
        """Return u shifted along e into the interior (unchanged if already inside)."""
        worst = -np.inf
        if self.nl:
            worst = float(-np.min(u[: self.nl]))
        if self.nsoc:
            head, t2 = self._soc_parts(u)
            worst = max(worst, float(np.max(np.sqrt(np.maximum(t2, 0)) - head)))
        if worst < 0:
            return u.copy()
        return u + (1.0 + worst) * self.e

    def prod(self, u, v):
        """Jordan product u o v."""
        nl = self.nl
        out = u * v
        if self.nsoc:
            us, vs = u[nl:], v[nl:]
            u0, v0 = us[self._rel], vs[self._rel]
            o = u0[self.blk] * vs + v0[self.blk] * us
            o[self._rel] = self._seg(us * vs)
            out[nl:] = o
        return out

    def div(self, lam, d):
        """Solve lam o x = d for x."""
        nl = self.nl
        out = np.empty_like(d)
        out[:nl] = d[:nl] / lam[:nl]
        if self.nsoc:
            ls, vs = lam[nl:], d[nl:]
            l0, v0 = ls[self._rel], vs[self._rel]
            det = 2 * l0 * l0 - self._seg(ls * ls)
            x0 = (2 * l0 * v0 - self._seg(ls * vs)) / det
            o = (vs - x0[self.blk] * ls) / l0[self.blk]
            o[self._rel] = x0
            out[nl:] = o
        return out

    def nt_scaling(self, s, z):
        """Nesterov-Todd scaling point of (s, z); ``lam = W z = W^{-1} s``."""
        sc = _Scaling(self, s, z)
        return sc, sc.apply(z)


class _Scaling:
    """Block-diagonal Nesterov-Todd scaling ``W`` and its inverse as dense matrices.

    Each SOC block is ``beta (diag(j) + u u^T)`` with ``j = (-1, 1, ..., 1)``,
    ``u = (sqrt(1 + w0), w1 / sqrt(1 + w0))`` for the normalized scaling
    point ``w``; the inverse flips the sign of ``w1``.
    """

    def __init__(self, cones: _Cones, s, z):
        nl, m = cones.nl, cones.m
        W = np.zeros((m, m))
        Winv = np.zeros((m, m))
        idx = np.arange(nl)
        r = np.sqrt(s[:nl] / z[:nl])
        W[idx, idx] = r
        Winv[idx, idx] = 1.0 / r
        if cones.nsoc:
            hs, ts = cones._soc_parts(s)
            hz, tz = cones._soc_parts(z)
            sn = np.sqrt(np.maximum(hs * hs - ts, 1e-300))
            zn = np.sqrt(np.maximum(hz * hz - tz, 1e-300))
            sb = s[nl:] / sn[cones.blk]
            zb = z[nl:] / zn[cones.blk]
            gam = np.sqrt(np.maximum((1.0 + cones._seg(sb * zb)) / 2.0, 1e-300))
            wb = (sb - zb) / (2.0 * gam[cones.blk])
            w0 = (sb[cones._rel] + zb[cones._rel]) / (2.0 * gam)
            beta = np.sqrt(sn / zn)
            a = np.sqrt(1.0 + w0)
            u = wb / a[cones.blk]
            u[cones._rel] = a
            bet = beta[cones.blk]
            same = cones.blk[:, None] == cones.blk[None, :]
            jj = -cones.j
            blk = np.diag(jj) + np.outer(u, u) * same
            W[nl:, nl:] = blk * bet[:, None]
            uinv = -u
            uinv[cones._rel] = a
            blk = np.diag(jj) + np.outer(uinv, uinv) * same
            Winv[nl:, nl:] = blk / bet[:, None]
        self.W = W
        self.Winv = Winv

    def apply(self, u):
        return self.W @ u

    def apply_inv(self, u):
        return self.Winv @ u


def _soc_steps(qa, qb, qc):
    """Smallest positive root, over all blocks, of ``qa a^2 + qb a + qc``.

    The quadratic is the cone function ``(u0 + a d0)^2 - ||u1 + a d1||^2`` of
    a point starting strictly inside (``qc > 0``), so its first sign change is
    the exit.  In every case with a positive root that root is
    ``2 qc / (-qb + sqrt(disc))``; otherwise the ray stays inside.
    """
    if np.any(qc <= 0):
        return 0.0
    disc = qb * qb - 4.0 * qa * qc
    den = -qb + np.sqrt(np.maximum(disc, 0.0))
    ok = (disc >= 0) & (den > 0)
    if not np.any(ok):
        return np.inf
    return float(np.min(2.0 * qc[ok] / den[ok]))


# ---------------------------------------------------------------------------


def _split(prog: ConeProgram):
    """Separate zero-cone rows (equalities) and order inequality rows."""
    eq_rows, nl_rows, soc_blocks = [], [], []
    start = 0
    for cone in prog.cones:
        rows = list(range(start, start + cone.size))
        start += cone.size
        if cone.kind == "zero":
            eq_rows.extend(rows)
        elif cone.kind == "nonneg" or cone.size == 1:
            nl_rows.extend(rows)
        else:
            soc_blocks.append(rows)
    ineq_rows = nl_rows + [r for blk in soc_blocks for r in blk]
    cones = _Cones(len(nl_rows), [len(blk) for blk in soc_blocks])
    return np.array(eq_rows, dtype=int), np.array(ineq_rows, dtype=int), cones


def solve(prog: ConeProgram, opts: SolverOptions | None = None) -> SolveReport:
    """Solve a cone program.

    Raises
    ------
    ConeProgramError
        If the data contain NaN or infinite entries.
    """
    opts = opts or SolverOptions()
    prog.check_finite()
    eq_rows, ineq_rows, cones = _split(prog)
    A_eq, b_eq = prog.A[eq_rows], prog.b[eq_rows]
    G, h = prog.A[ineq_rows], prog.b[ineq_rows]

    # past the attainable accuracy the scaling can overflow; such steps are
    # rejected inside the loop and the best iterate is returned
    with np.errstate(all="ignore"):
        x, y_eq, z, s, status, it, res = _hsd(prog.c, G, h, A_eq, b_eq, cones, opts)

    y = np.zeros(prog.n_rows)
    y[eq_rows] = y_eq
    y[ineq_rows] = z
    slack = np.zeros(prog.n_rows)
    slack[ineq_rows] = s
    certificate = None
    if status is SolveStatus.INFEASIBLE:
        certificate = y
    elif status is SolveStatus.UNBOUNDED:
        certificate = x
    objective = float(prog.c @ x)
    return SolveReport(status, x, y, slack, objective, it, res, certificate)


def _hsd(c, G, h, A, b, cones: _Cones, opts: SolverOptions):
    n = c.size
    p = b.size
    m = G.shape[0]
    tol = opts.tol
    nrm_c = max(1.0, np.linalg.norm(c))
    nrm_b = max(1.0, np.linalg.norm(b))
    nrm_h = max(1.0, np.linalg.norm(h))
    nrm_bh = max(1.0, float(np.hypot(np.linalg.norm(b), np.linalg.norm(h))))
    N = n + p + m

    # Newton systems use the scaled matrix [[0, A^T, Gs^T], [A, 0, 0], [Gs, 0, -I]]
    # with Gs = W^{-1} G and the third unknown W z
    K = np.zeros((N, N))
    K[:n, n:n + p] = A.T
    K[n:n + p, :n] = A
    K[n + p:, n + p:] = -np.eye(m)
    reg = np.concatenate([np.full(n, 1e-12), np.full(p, -1e-12), np.zeros(m)])
    diag = np.arange(N)

    # starting point: least-squares primal slack and dual variable, shifted inside
    K[:n, n + p:] = G.T
    K[n + p:, :n] = G
    lu = sla.lu_factor(K + np.diag(reg), check_finite=False)
    sol = sla.lu_solve(lu, np.concatenate([np.zeros(n), b, h]), check_finite=False)
    x = sol[:n]
    s = cones.shift_to_interior(h - G @ x)
    sol = sla.lu_solve(lu, np.concatenate([-c, np.zeros(p + m)]), check_finite=False)
    y = sol[n:n + p]
    z = cones.shift_to_interior(sol[n + p:])
    tau, kappa = 1.0, 1.0

    status = SolveStatus.MAX_ITERATIONS
    res = (np.inf, np.inf, np.inf)
    best = None
    it = 0
    for it in range(opts.max_iters + 1):
        r1 = A.T @ y + G.T @ z + c * tau
        r2 = A @ x - b * tau
        r3 = G @ x + s - h * tau
        cx, by, hz = c @ x, b @ y, h @ z
        r4 = kappa + cx + by + hz
        sz = s @ z
        mu = (sz + tau * kappa) / (cones.degree + 1)

        pres = max(np.linalg.norm(r2) / nrm_b, np.linalg.norm(r3) / nrm_h) / tau
        dres = np.linalg.norm(r1) / nrm_c / tau
        pcost = cx / tau
        dcost = -(by + hz) / tau
        relgap = sz / tau ** 2 / max(1.0, abs(pcost), abs(dcost))
        res = (pres, dres, relgap)
        merit = max(res)
        if best is None or merit < best[0]:
            best = (merit, x / tau, y / tau, z / tau, s / tau, res)
        if pres <= tol and dres <= tol and relgap <= tol:
            status = SolveStatus.OPTIMAL
            break
        if by + hz < 0:
            # an approximate certificate only excludes points up to norm 1 / pinf,
            # so it has to reach past the scale set by the data
            pinf = np.linalg.norm(A.T @ y + G.T @ z) * nrm_bh / nrm_c / -(by + hz)
            if pinf <= tol:
                scale = -(by + hz)
                return x, y / scale, z / scale, s, SolveStatus.INFEASIBLE, it, res
        if cx < 0:
            dinf = max(np.linalg.norm(A @ x) / nrm_b,
                       np.linalg.norm(G @ x + s) / nrm_h) / -cx
            if dinf <= tol:
                return x / -cx, y, z, s, SolveStatus.UNBOUNDED, it, res
        if it == opts.max_iters:
            break

        W, lam = cones.nt_scaling(s, z)
        Gs = W.Winv @ G
        K[:n, n + p:] = Gs.T
        K[n + p:, :n] = Gs
        Kreg = K.copy()
        Kreg[diag, diag] += reg
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu = sla.lu_factor(Kreg, check_finite=False)
        except (ValueError, np.linalg.LinAlgError):
            break
        if not np.all(np.isfinite(lu[0])):
            break

        def ksolve(rhs):
            sol = sla.lu_solve(lu, rhs, check_finite=False)
            for _ in range(opts.refine):
                sol += sla.lu_solve(lu, rhs - K @ sol, check_finite=False)
            return sol

        def unpack(sol):
            return sol[:n], sol[n:n + p], sol[n + p:]

        x1, y1, zs1 = unpack(ksolve(np.concatenate([-c, b, W.apply_inv(h)])))
        z1 = W.apply_inv(zs1)
        denom = c @ x1 + b @ y1 + h @ z1 - kappa / tau

        def direction(ds, dkappa, shrink):
            # G dx + ds = -shrink r3 and lam o (W^{-1} ds + W dz) = ds_target
            ld = cones.div(lam, ds)
            x2, y2, zs2 = unpack(ksolve(np.concatenate(
                [-shrink * r1, -shrink * r2, -shrink * W.apply_inv(r3) - ld])))
            z2 = W.apply_inv(zs2)
            dtau = (-shrink * r4 - (c @ x2 + b @ y2 + h @ z2) - dkappa / tau) / denom
            dx = x2 + dtau * x1
            dy = y2 + dtau * y1
            dzs = zs2 + dtau * zs1
            dz = W.apply_inv(dzs)
            dkap = (dkappa - kappa * dtau) / tau
            # from the primal row rather than W (ld - W dz): keeps G x + s = h tau
            # exact along the step even when W has a large dynamic range
            ds_ = -shrink * r3 - G @ dx + h * dtau
            return dx, dy, dz, dtau, ds_, dkap, dzs

        def step_length(dz, dtau, ds_, dkap):
            a = cones.max_step2(s, ds_, z, dz)
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkap < 0:
                a = min(a, -kappa / dkap)
            return a

        lam_sq = cones.prod(lam, lam)
        dxa, dya, dza, dtaua, dsa, dkapa, dzsa = direction(-lam_sq, -tau * kappa, 1.0)
        alpha_aff = min(1.0, step_length(dza, dtaua, dsa, dkapa))
        sigma = (1.0 - alpha_aff) ** 3

        ds_c = -lam_sq - cones.prod(W.apply_inv(dsa), dzsa) + sigma * mu * cones.e
        dk_c = -tau * kappa - dtaua * dkapa + sigma * mu
        dx, dy, dz, dtau, ds_, dkap, _ = direction(ds_c, dk_c, 1.0 - sigma)
        alpha = min(1.0, opts.step_fraction * step_length(dz, dtau, ds_, dkap))
        if not np.isfinite(alpha) or alpha <= 0:
            break
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dz)) and np.all(np.isfinite(ds_))
                and np.isfinite(dtau) and np.isfinite(dkap)):
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * ds_
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkap

        # keep the homogeneous scale bounded
        scale = max(tau, kappa)
        if scale > 1e6 or scale < 1e-6:
            x, y, z, s = x / scale, y / scale, z / scale, s / scale
            tau, kappa = tau / scale, kappa / scale

    if status is SolveStatus.OPTIMAL:
        return x / tau, y / tau, z / tau, s / tau, status, it, res
    _, xb, yb, zb, sb, res = best
    return xb, yb, zb, sb, SolveStatus.MAX_ITERATIONS, it, res


# ---------------------------------------------------------------------------


def kkt_residuals(prog: ConeProgram, x: np.ndarray, y: np.ndarray):
    """KKT residuals recomputed from the program data alone.

    Returns ``(primal, dual, gap)``: cone violation of ``b - A x`` (with
    equality rows measured directly), ``||A^T y + c||`` plus the dual cone
    violation of ``y``, and the relative duality gap.
    """
    s = prog.b - prog.A @ x
    primal = 0.0
    dual = float(np.linalg.norm(prog.A.T @ y + prog.c))
    start = 0
    for cone in prog.cones:
        sl = slice(start, start + cone.size)
        start += cone.size
        sb, yb = s[sl], y[sl]
        if cone.kind == "zero":
            primal = max(primal, float(np.max(np.abs(sb))))
        elif cone.kind == "nonneg" or cone.size == 1:
            primal = max(primal, float(max(0.0, -np.min(sb))))
            dual = max(dual, float(max(0.0, -np.min(yb))))
        else:
            primal = max(primal, float(max(0.0, np.linalg.norm(sb[1:]) - sb[0])))
            dual = max(dual, float(max(0.0, np.linalg.norm(yb[1:]) - yb[0])))
    pcost = float(prog.c @ x)
    dcost = float(-prog.b @ y)
    gap = abs(pcost - dcost) / max(1.0, abs(pcost), abs(dcost))
    return primal / max(1.0, np.linalg.norm(prog.b)), dual / max(1.0, np.linalg.norm(prog.c)), gap


def certificate_residual(prog: ConeProgram, y: np.ndarray) -> float:
    """How far ``y`` is from proving ``prog`` infeasible (0 for an exact certificate).

    Normalizes ``y`` so that ``b^T y = -1`` and returns the larger of
    ``max(1, ||b||) ||A^T y||`` and the dual cone violation; ``inf`` if
    ``b^T y >= 0``.  A residual ``e`` rules out feasible points with
    ``||x|| < max(1, ||b||) / e`` (up to the norm of ``A``).
    """
    y = np.asarray(y, dtype=float)
    by = float(prog.b @ y)
    if not by < 0:
        return float("inf")
    y = y / -by
    worst = float(np.linalg.norm(prog.A.T @ y)) * max(1.0, float(np.linalg.norm(prog.b)))
    start = 0
    for cone in prog.cones:
        yb = y[start:start + cone.size]
        start += cone.size
        if cone.kind == "nonneg" or (cone.kind == "soc" and cone.size == 1):
            worst = max(worst, float(max(0.0, -np.min(yb))))
        elif cone.kind == "soc":
            worst = max(worst, float(max(0.0, np.linalg.norm(yb[1:]) - yb[0])))
    return worst


def dump_program(prog: ConeProgram, path: str | Path):
    """Write a program as plain text: cone list, dense c and b, coordinate A."""
    lines = ["%%ConeProgram coordinate real general",
             "% cones: " + " ".join(f"{k.kind}:{k.size}" for k in prog.cones),
             "% c: " + " ".join(repr(float(v)) for v in prog.c),
             "% b: " + " ".join(repr(float(v)) for v in prog.b)]
    rows, cols = np.nonzero(prog.A)
    lines.append(f"{prog.n_rows} {prog.n_vars} {rows.size}")
    for i, j in zip(rows, cols):
        lines.append(f"{i + 1} {j + 1} {float(prog.A[i, j])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_program(path: str | Path) -> ConeProgram:
    header = {}
    entries = []
    shape = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("%%"):
            continue
        if line.startswith("%"):
            key, _, val = line[1:].partition(":")
            header[key.strip()] = val.split()
        elif shape is None:
            shape = tuple(int(v) for v in line.split()[:2])
        else:
            i, j, v = line.split()
            entries.append((int(i) - 1, int(j) - 1, float(v)))
    A = np.zeros(shape)
    for i, j, v in entries:
        A[i, j] = v
    cones = []
    for tok in header["cones"]:
        kind, _, size = tok.partition(":")
        cones.append(Cone(kind, int(size)))
    c = np.array([float(v) for v in header.get("c", [])])
    b = np.array([float(v) for v in header.get("b", [])])
    return ConeProgram(c, A, b, tuple(cones))


_BUILDERS = ("LocalTemplate", "VariableMap", "ZeroChannelError", "build_centralized", "build_local")


def __getattr__(name):
    # the beamforming builders live in their own module, which imports this one
    if name in _BUILDERS:
        from . import builders
        return getattr(builders, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
