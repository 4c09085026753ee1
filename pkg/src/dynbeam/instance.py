"""Plain-text scenario files.

One ``key = value`` pair per line; ``#`` starts a comment.  Indices in keys
and in ``assign`` are 1-based.  Floats are written with ``repr`` so reading
back gives the identical doubles.

    n_bs = 2
    n_users = 4
    n_tx = 4
    assign = 1 1 2 2
    gamma = 10.0 10.0 10.0 10.0
    sigma2 = 10.0 10.0 10.0 10.0
    h.1.1 = re_1 im_1 re_2 im_2 ...        channel from base station 1 to user 1

A track file additionally has ``steps = L`` and keys ``h.<step>.<m>.<k>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import ChannelSet, QosSpec, Topology


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    topo: Topology
    q: QosSpec
    channels: tuple[ChannelSet, ...]

    @property
    def H(self) -> ChannelSet:
        return self.channels[0]


def read_kv(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file, rejecting duplicate keys."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InstanceFormatError(f"{path}:{lineno}: expected key = value")
        key = key.strip()
        if key in out:
            raise InstanceFormatError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def _floats(vals) -> str:
    return " ".join(repr(float(v)) for v in vals)


def _channel_lines(prefix: str, H: ChannelSet) -> list[str]:
    lines = []
    B, K, _ = H.shape
    for m in range(B):
        for k in range(K):
            inter = np.column_stack([H.h[m, k].real, H.h[m, k].imag]).ravel()
            lines.append(f"{prefix}{m + 1}.{k + 1} = {_floats(inter)}")
    return lines


def format_instance(topo: Topology, q: QosSpec, channels) -> str:
    if isinstance(channels, ChannelSet):
        channels = [channels]
    channels = list(channels)
    lines = [f"n_bs = {topo.n_bs}", f"n_users = {topo.n_users}", f"n_tx = {topo.n_tx}",
             "assign = " + " ".join(str(b + 1) for b in topo.assign),
             f"gamma = {_floats(q.gamma)}", f"sigma2 = {_floats(q.sigma2)}"]
    if len(channels) == 1:
        lines += _channel_lines("h.", channels[0])
    else:
        lines.append(f"steps = {len(channels)}")
        for i, H in enumerate(channels):
            lines += _channel_lines(f"h.{i + 1}.", H)
    return "\n".join(lines) + "\n"


def write_instance(path: str | Path, topo: Topology, q: QosSpec, channels):
    Path(path).write_text(format_instance(topo, q, channels), encoding="utf-8")


def _parse_channel(kv: dict, prefix: str, topo: Topology) -> ChannelSet:
    h = np.zeros((topo.n_bs, topo.n_users, topo.n_tx), dtype=complex)
    for m in range(topo.n_bs):
        for k in range(topo.n_users):
            key = f"{prefix}{m + 1}.{k + 1}"
            if key not in kv:
                raise InstanceFormatError(f"missing channel {key}")
            vals = np.array([float(v) for v in kv.pop(key).split()])
            if vals.size != 2 * topo.n_tx:
                raise InstanceFormatError(f"{key} needs {2 * topo.n_tx} numbers, got {vals.size}")
            h[m, k] = vals[0::2] + 1j * vals[1::2]
    return ChannelSet(h)


def read_instance(path: str | Path) -> Instance:
    kv = read_kv(path)
    try:
        n_bs = int(kv.pop("n_bs"))
        n_users = int(kv.pop("n_users"))
        n_tx = int(kv.pop("n_tx"))
        assign = tuple(int(v) - 1 for v in kv.pop("assign").split())
        gamma = [float(v) for v in kv.pop("gamma").split()]
        sigma2 = [float(v) for v in kv.pop("sigma2").split()]
    except KeyError as exc:
        raise InstanceFormatError(f"missing field {exc.args[0]}") from None
    topo = Topology(n_bs, n_users, n_tx, assign)
    if len(gamma) != n_users or len(sigma2) != n_users:
        raise InstanceFormatError("gamma and sigma2 need one value per user")
    q = QosSpec(gamma, sigma2)
    if "steps" in kv:
        steps = int(kv.pop("steps"))
        channels = tuple(_parse_channel(kv, f"h.{i + 1}.", topo) for i in range(steps))
    else:
        channels = (_parse_channel(kv, "h.", topo),)
    if kv:
        raise InstanceFormatError(f"unknown keys: {', '.join(sorted(kv))}")
    return Instance(topo, q, channels)
