"""Static H-tree interconnect with an analytic latency model.

Leaves are the endpoints, internal nodes are switches. A packet climbs to
the lowest common ancestor of its endpoints and back down; each switch costs
``router_pipeline + link_latency`` cycles. Packets leaving the same source
serialize at one flit per cycle; there is no other contention.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NodeOutOfRange
from .mesh import MeshConfig, SimStats


def levels(nodes: int) -> int:
    return max(1, math.ceil(math.log2(max(nodes, 2))))


def tree_hops(src: int, dst: int) -> int:
    # switches traversed: up to the common ancestor and back down
    up = (src ^ dst).bit_length()
    return 2 * up - 1 if up else 1


def simulate_tree(trace, cfg: MeshConfig) -> SimStats:
    ev = np.asarray(trace, dtype=np.int64).reshape(-1, 3)
    if len(ev) == 0:
        return SimStats()
    n = cfg.nodes
    if ((ev[:, :2] < 0) | (ev[:, :2] >= n)).any():
        raise NodeOutOfRange(f"trace references a node outside the {n}-leaf tree", nodes=n)
    order = np.argsort(ev[:, 2], kind="stable")
    per_switch = cfg.router_pipeline + cfg.link_latency
    free = {}
    lat = np.zeros(len(ev), dtype=np.int64)
    hops = 0
    makespan = 0
    for idx in order.tolist():
        s, d, ts = (int(v) for v in ev[idx])
        start = max(ts, free.get(s, 0))
        free[s] = start + cfg.packet_flits
        h = tree_hops(s, d)
        done = start + h * per_switch + cfg.packet_flits - 1
        lat[idx] = done - ts
        makespan = max(makespan, done)
        hops += h * cfg.packet_flits
    lat.flags.writeable = False
    stats = SimStats(len(ev), len(ev), int(makespan), float(lat.mean()), hops, lat)
    area, energy = tree_area_energy(stats, cfg)
    return SimStats(**{**stats.__dict__, "energy": energy, "area": area})


def tree_area_energy(stats: SimStats, cfg: MeshConfig):
    leaves = 2 ** levels(cfg.nodes)
    switches = leaves - 1
    # H-tree wire: each level halves the segment length, 2^l segments at level l
    wire_mm = sum(2 ** lvl * cfg.node_pitch * math.sqrt(leaves) / 2 ** (lvl / 2 + 1)
                  for lvl in range(1, levels(cfg.nodes) + 1))
    per_hop = cfg.router_energy_per_flit + cfg.link_energy_per_bit_per_mm * cfg.flit_width * cfg.node_pitch
    return switches * cfg.router_area + wire_mm * cfg.link_area_per_mm, stats.flit_hops * per_hop
