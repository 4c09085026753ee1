"""Command-line interface.

    dynbeam solve  [INSTANCE | --random SEED]
    dynbeam track  [--rho R ...] [--zeta Z] [--steps L] [--seed S] --out DIR
    dynbeam ensemble [--rho R ...] [--tracks N] ... --out DIR
    dynbeam verify [--quick] [--inject-fault]

Every scenario flag can also be given in a ``--config`` file of ``key = value``
lines (keys are the flag names with ``_`` for ``-``; ``rho`` takes a
space-separated list).  Flags on the command line win over the file.

Exit codes: 0 ok, 1 usage error, 2 infeasible input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .admm import AdmmConfig
from .builders import ZeroChannelError, build_centralized
from .duality import DualityError, solve_uplink_fixed_point
from .harness import ExperimentConfig, csv_name, run_ensemble, run_track, write_csv
from .instance import InstanceFormatError, read_instance, read_kv, write_instance
from .model import QosSpec, Topology, sinr_all
from .socp import SolverOptions, SolveStatus, certificate_residual, solve
from .tracks import TrackConfig, TrackGenerationError, generate_track, sample_initial

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {
    "rho": [50.0],
    "zeta": 0.01,
    "steps": 50,
    "tracks": 1,
    "seed": 0,
    "track_id": 0,
    "out": None,
    "nt": 4,
    "nb": 2,
    "users_per_bs": 2,
    "gamma": 10.0,
    "sigma2": 10.0,
    "jobs": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("scenario")
    g.add_argument("--nb", type=int, help="base stations (default 2)")
    g.add_argument("--nt", type=int, help="antennas per base station (default 4)")
    g.add_argument("--users-per-bs", type=int, help="users served by each base station (default 2)")
    g.add_argument("--gamma", type=float, help="SINR target, linear (default 10)")
    g.add_argument("--sigma2", type=float, help="noise power (default 10)")
    g.add_argument("--config", type=Path, help="key = value file mirroring the flags")


def _track_flags(p: argparse.ArgumentParser, ensemble: bool):
    p.add_argument("--rho", type=float, action="append",
                   help="penalty parameter; repeat for a sweep (default 50)")
    p.add_argument("--zeta", type=float, help="innovation weight in [0, 1] (default 0.01)")
    p.add_argument("--steps", type=int, help="channels per track (default 50)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--out", type=Path, help="output directory (required)")
    if ensemble:
        p.add_argument("--tracks", type=int, help="number of tracks (default 1)")
        p.add_argument("--jobs", type=int, help="worker processes (default: available cores)")
    else:
        p.add_argument("--track-id", type=int, help="track index within the seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynbeam", description="Distributed dynamic downlink beamforming by consensus ADMM.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="centralized optimum of one instance by both oracles")
    s.add_argument("instance", nargs="?", type=Path, help="instance file")
    s.add_argument("--random", type=int, metavar="SEED", help="draw a random instance instead")
    s.add_argument("--write-instance", type=Path, metavar="PATH",
                   help="save the solved instance to PATH")
    _scenario_flags(s)

    t = sub.add_parser("track", help="one ADMM iteration per channel along a single track")
    _track_flags(t, ensemble=False)
    _scenario_flags(t)

    e = sub.add_parser("ensemble", help="average many tracks, one CSV per rho")
    _track_flags(e, ensemble=True)
    _scenario_flags(e)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--quick", action="store_true", help="reduced sample sizes")
    v.add_argument("--inject-fault", action="store_true",
                   help="perturb the consensus averaging to exercise the failure path")
    return p


# configuration ---------------------------------------------------------------

_CASTS = {"rho": lambda s: [float(v) for v in s.split()], "zeta": float, "steps": int,
          "tracks": int, "seed": int, "track_id": int, "out": Path, "nt": int, "nb": int,
          "users_per_bs": int, "gamma": float, "sigma2": float, "jobs": int}


def effective_config(args: argparse.Namespace) -> dict:
    """Defaults, overridden by the config file, overridden by flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None) is not None:
        try:
            kv = read_kv(args.config)
        except (OSError, InstanceFormatError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for key, val in kv.items():
            key = key.replace("-", "_")
            if key not in _CASTS:
                raise UsageError(f"unknown config key {key!r}")
            try:
                cfg[key] = _CASTS[key](val)
            except ValueError:
                raise UsageError(f"bad value for {key}: {val!r}") from None
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg["jobs"] is None:
        cfg["jobs"] = os.cpu_count() or 1
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    positive = ("steps", "tracks", "nt", "nb", "users_per_bs", "jobs")
    for key in positive:
        if cfg[key] < 1:
            raise UsageError(f"{key.replace('_', '-')} must be at least 1")
    if not cfg["rho"] or any(not r > 0 for r in cfg["rho"]):
        raise UsageError("rho must be positive")
    if len(set(cfg["rho"])) != len(cfg["rho"]):
        raise UsageError("repeated rho value")
    if not 0.0 <= cfg["zeta"] <= 1.0:
        raise UsageError("zeta must lie in [0, 1]")
    if not cfg["gamma"] > 0 or not cfg["sigma2"] > 0:
        raise UsageError("gamma and sigma2 must be positive")
    if cfg["track_id"] < 0 or cfg["seed"] < 0:
        raise UsageError("seed and track-id must be nonnegative")


def _scenario(cfg: dict) -> tuple[Topology, QosSpec]:
    topo = Topology.uniform(cfg["nb"], cfg["users_per_bs"], cfg["nt"])
    return topo, QosSpec.uniform(topo.n_users, cfg["gamma"], cfg["sigma2"])


def format_config(cfg: dict) -> str:
    lines = []
    for key in DEFAULTS:
        val = cfg[key]
        if key == "rho":
            val = " ".join(repr(float(r)) for r in val)
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


# commands ---------------------------------------------------------------------

def cmd_solve(args, cfg) -> int:
    if (args.instance is None) == (args.random is None):
        raise UsageError("give either an instance file or --random SEED")
    if args.instance is not None:
        try:
            inst = read_instance(args.instance)
        except (OSError, InstanceFormatError, ValueError) as exc:
            raise UsageError(f"cannot read instance: {exc}") from None
        topo, q, H = inst.topo, inst.q, inst.H
        print(f"instance {args.instance}")
    else:
        topo, q = _scenario(cfg)
        H = sample_initial(topo, args.random)
        print(f"random instance, seed {args.random}")
    if args.write_instance is not None:
        write_instance(args.write_instance, topo, q, H)
    print(f"B={topo.n_bs} K={topo.n_users} N_T={topo.n_tx}")

    try:
        prog, vmap = build_centralized(H, topo, q)
    except ZeroChannelError as exc:
        print(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    # per-user powers are only as accurate as the beamformers; try a tight solve first
    rep = solve(prog, SolverOptions(tol=1e-12))
    if not rep.optimal:
        rep = solve(prog)
    try:
        dual = solve_uplink_fixed_point(H, topo, q)
        dual_msg = None
    except DualityError as exc:
        dual, dual_msg = None, str(exc)

    if not rep.optimal or dual is None:
        print("infeasible instance")
        if rep.status is SolveStatus.INFEASIBLE:
            res = certificate_residual(prog, rep.certificate)
            print(f"  SOCP: infeasible, certificate residual {res:.2e}")
        else:
            print(f"  SOCP: {rep.status.value}")
        print(f"  duality: {'infeasible, ' + dual_msg if dual is None else 'feasible'}")
        return EXIT_INFEASIBLE

    W = vmap.beamformers(rep.x)
    sinr_socp = sinr_all(W, H, topo, q)
    sinr_dual = sinr_all(dual.W_star, H, topo, q)
    p_socp = np.sum(np.abs(W) ** 2, axis=1)
    print(f"{'user':>4} {'bs':>3} {'power_socp':>14} {'power_dual':>14} {'sinr_socp':>11} {'sinr_dual':>11}")
    for k in range(topo.n_users):
        print(f"{k + 1:>4} {topo.assign[k] + 1:>3} {p_socp[k]:14.8f} {dual.powers[k]:14.8f} "
              f"{sinr_socp[k]:11.6f} {sinr_dual[k]:11.6f}")
    tot_s, tot_d = float(np.sum(p_socp)), dual.total_power
    print(f"total power  SOCP {tot_s:.10g}  duality {tot_d:.10g}")
    print(f"relative discrepancy {abs(tot_s - tot_d) / tot_d:.3e}")
    return EXIT_OK


def _prepare_out(cfg: dict) -> Path:
    if cfg["out"] is None:
        raise UsageError("--out DIR is required")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(format_config(cfg), encoding="utf-8")
    return out


def _print_summary(rho, results, q):
    gaps, mins, n_dist, n_sinr = [], [], 0, 0
    for r in results:
        gaps.append(np.mean((r.power_admm - r.power_opt) / r.power_opt))
        mins.append(float(np.min(r.sinr)))
        n_dist += len(r.distance_violations())
        n_sinr += len(r.sinr_bound_violations(q))
    print(f"rho={rho:g}: mean power gap {np.mean(gaps):+.4%}, min SINR {min(mins):.4f}, "
          f"bound violations: distance {n_dist}, SINR {n_sinr}")
    return n_dist + n_sinr


def cmd_track(args, cfg) -> int:
    out = _prepare_out(cfg)
    topo, q = _scenario(cfg)
    tcfg = TrackConfig(topo, q, zeta=cfg["zeta"], length=cfg["steps"], seed=cfg["seed"],
                       track_id=cfg["track_id"])
    try:
        track = generate_track(tcfg)
    except TrackGenerationError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    write_instance(out / "track.txt", topo, q, track)
    for rho in cfg["rho"]:
        res = run_track(track, topo, q, AdmmConfig(rho=rho), cfg["track_id"])
        write_csv(out / csv_name(rho), [res])
        _print_summary(rho, [res], q)
    return EXIT_OK


def cmd_ensemble(args, cfg) -> int:
    out = _prepare_out(cfg)
    topo, q = _scenario(cfg)
    exp = ExperimentConfig(topo, q, zeta=cfg["zeta"], steps=cfg["steps"], n_tracks=cfg["tracks"],
                           seed=cfg["seed"], rhos=tuple(cfg["rho"]), out_dir=out, jobs=cfg["jobs"])
    try:
        res = run_ensemble(exp)
    except TrackGenerationError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for rho, (_, results) in res.items():
        _print_summary(rho, results, q)
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    scale = verify.QUICK if args.quick else verify.FULL

    def report(r):
        print(r.line(), flush=True)

    if args.inject_fault:
        with verify.injected_fault():
            results = verify.run_all(scale, report)
    else:
        results = verify.run_all(scale, report)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"verification FAILED: {', '.join(failed)}")
        return EXIT_VERIFY
    print("verification passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = effective_config(args)
        if args.command == "solve":
            return cmd_solve(args, cfg)
        if args.command == "track":
            return cmd_track(args, cfg)
        return cmd_ensemble(args, cfg)
    except UsageError as exc:
        print(f"dynbeam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
