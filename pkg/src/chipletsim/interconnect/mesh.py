"""Cycle-accurate 2D mesh simulation front end.

The compiled kernel (``_mesh_core``) is used when it was built; otherwise,
or when ``CHIPLETSIM_PURE_PYTHON=1`` is set, the pure-Python kernel runs.
Both produce identical results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import NodeOutOfRange
from . import _mesh_py

_core = None
if os.environ.get("CHIPLETSIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _mesh_core as _core
    except ImportError:  # extension not built
        _core = None

BACKEND = "compiled" if _core is not None else "python"


def kernel(name=None):
    """Return the kernel ``run`` function for ``name`` ("compiled"/"python"/None = default)."""
    name = name or BACKEND
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled mesh kernel is not available")
        return _core.run
    return _mesh_py.run


@dataclass(frozen=True)
class MeshConfig:
    width: int
    height: int
    flit_width: int = 32
    buffer_depth: int = 8
    router_pipeline: int = 2
    link_latency: int = 1
    packet_flits: int = 1
    frequency: float = 1e9
    router_energy_per_flit: float = 0.0
    link_energy_per_bit_per_mm: float = 0.0
    node_pitch: float = 1.0       # mm between adjacent routers
    router_area: float = 0.0
    link_area_per_mm: float = 0.0
    watchdog_cycles: int = 100000

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("mesh dimensions must be >= 1")
        if min(self.router_pipeline, self.link_latency, self.buffer_depth, self.packet_flits) < 1:
            raise ValueError("latencies, depth and packet size must be >= 1")

    @property
    def nodes(self) -> int:
        return self.width * self.height

    @property
    def links(self) -> int:
        w, h = self.width, self.height
        return w * (h - 1) + h * (w - 1)

    def zero_load_latency(self, src: int, dst: int) -> int:
        hops = abs(src % self.width - dst % self.width) + abs(src // self.width - dst // self.width) + 1
        return hops * (self.router_pipeline + self.link_latency) + self.packet_flits - 1


@dataclass(frozen=True)
class SimStats:
    packets_injected: int = 0
    packets_ejected: int = 0
    total_latency: int = 0          # cycles until the last packet left the network
    avg_packet_latency: float = 0.0
    flit_hops: int = 0
    latencies: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64), repr=False, compare=False)
    energy: float = 0.0
    area: float = 0.0

    def as_dict(self):
        return {
            "packets_injected": self.packets_injected,
            "packets_ejected": self.packets_ejected,
            "total_latency_cycles": self.total_latency,
            "avg_packet_latency": self.avg_packet_latency,
            "flit_hops": self.flit_hops,
            "energy": self.energy,
            "area": self.area,
        }


def _as_events(trace) -> np.ndarray:
    ev = np.asarray(trace, dtype=np.int64)
    if ev.size == 0:
        return np.zeros((0, 3), dtype=np.int64)
    return ev.reshape(-1, 3)


def simulate(trace, cfg: MeshConfig, backend=None) -> SimStats:
    """Run a ``(source, destination, timestamp)`` trace to completion."""
    ev = _as_events(trace)
    if len(ev) == 0:
        return SimStats()
    n = cfg.nodes
    bad = (ev[:, 0] < 0) | (ev[:, 0] >= n) | (ev[:, 1] < 0) | (ev[:, 1] >= n)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise NodeOutOfRange(f"event {row} references a node outside the {cfg.width}x{cfg.height} mesh",
                             event=row, nodes=n)
    if (ev[:, 2] < 0).any():
        raise ValueError("timestamps must be >= 0")
    order = np.argsort(ev[:, 2], kind="stable")
    ev = ev[order]
    run = kernel(backend)
    src, dst, ts = ev[:, 0].copy(), ev[:, 1].copy(), ev[:, 2].copy()
    if run is _mesh_py.run:
        lat, makespan, hops = run(src.tolist(), dst.tolist(), ts.tolist(), cfg.width, cfg.height,
                                  cfg.buffer_depth, cfg.router_pipeline, cfg.link_latency,
                                  cfg.packet_flits, cfg.watchdog_cycles)
    else:
        lat, makespan, hops = run(src, dst, ts, cfg.width, cfg.height, cfg.buffer_depth,
                                  cfg.router_pipeline, cfg.link_latency, cfg.packet_flits,
                                  cfg.watchdog_cycles)
    lat = np.asarray(lat, dtype=np.int64)
    # back to the caller's event order
    out = np.empty_like(lat)
    out[order] = lat
    out.flags.writeable = False
    stats = SimStats(
        packets_injected=len(ev), packets_ejected=int((lat > 0).sum()), total_latency=int(makespan),
        avg_packet_latency=float(lat.mean()), flit_hops=int(hops), latencies=out,
    )
    area, energy = area_energy(stats, cfg)
    return SimStats(**{**stats.__dict__, "energy": energy, "area": area})


def area_energy(stats: SimStats, cfg: MeshConfig):
    """(area um^2, dynamic energy pJ) of a mesh given its simulated flit hops."""
    per_hop = cfg.router_energy_per_flit + cfg.link_energy_per_bit_per_mm * cfg.flit_width * cfg.node_pitch
    energy = stats.flit_hops * per_hop
    area = cfg.nodes * cfg.router_area + cfg.links * cfg.link_area_per_mm * cfg.node_pitch
    return area, energy
