"""Intra-chiplet NoC engine: one cycle-accurate run per (chiplet, source layer)."""

from __future__ import annotations

from dataclasses import dataclass

from .config import ComponentCostLibrary, HardwareConfig
from .interconnect.mesh import MeshConfig, SimStats, simulate
from .interconnect.trace import noc_mesh_shape, noc_segments
from .interconnect.tree import simulate_tree, tree_area_energy
from .mapping import MappingResult


def noc_mesh_config(tiles: int, hw: HardwareConfig, lib: ComponentCostLibrary) -> MeshConfig:
    cols, rows = noc_mesh_shape(tiles)
    noc = hw.noc
    return MeshConfig(
        width=cols, height=rows, flit_width=noc.flit_width, buffer_depth=noc.buffer_depth,
        router_pipeline=noc.router_pipeline, link_latency=noc.link_latency,
        packet_flits=noc.packet_flits, frequency=hw.noc_frequency,
        router_energy_per_flit=lib["noc_router"].energy,
        link_energy_per_bit_per_mm=lib["noc_link_per_mm"].energy,
        node_pitch=noc.node_pitch_mm, router_area=lib["noc_router"].area,
        link_area_per_mm=lib["noc_link_per_mm"].area, watchdog_cycles=noc.watchdog_cycles,
    )


def noc_area(cfg: MeshConfig, topology="mesh") -> float:
    if topology == "tree":
        return tree_area_energy(SimStats(), cfg)[0]
    return cfg.nodes * cfg.router_area + cfg.links * cfg.link_area_per_mm * cfg.node_pitch


@dataclass(frozen=True)
class NocResult:
    per_layer_latency: tuple   # ns, slowest chiplet of the layer
    per_layer_energy: tuple    # pJ
    segments: dict             # (chiplet, layer) -> SimStats
    area: float                # um^2, all dies
    leakage_power: float       # uW, all routers
    frequency: float

    @property
    def latency(self) -> float:
        return sum(self.per_layer_latency)

    @property
    def energy(self) -> float:
        return sum(self.per_layer_energy)

    def summary(self) -> dict:
        segs = list(self.segments.values())
        injected = sum(s.packets_injected for s in segs)
        total_lat = sum(s.avg_packet_latency * s.packets_injected for s in segs)
        return {
            "segments": len(segs),
            "packets_injected": injected,
            "packets_ejected": sum(s.packets_ejected for s in segs),
            "flit_hops": sum(s.flit_hops for s in segs),
            "avg_packet_latency_cycles": total_lat / injected if injected else 0.0,
            "latency_ns": self.latency,
            "energy_pj": self.energy,
            "area_um2": self.area,
            "frequency_hz": self.frequency,
        }


def run_noc(mapping: MappingResult, net, hw: HardwareConfig, lib=None) -> NocResult:
    lib = lib if lib is not None else hw.components
    cfg = noc_mesh_config(mapping.tiles_per_chiplet, hw, lib)
    sim = simulate_tree if hw.noc.topology == "tree" else simulate
    cycle_ns = 1e9 / cfg.frequency
    n = len(mapping.per_layer)
    latency = [0.0] * n
    energy = [0.0] * n
    segments = {}
    for (chip, layer), events in noc_segments(mapping, net, hw).items():
        stats = sim(events, cfg)
        segments[(chip, layer)] = stats
        latency[layer] = max(latency[layer], stats.total_latency * cycle_ns)
        energy[layer] += stats.energy
    dies = mapping.available_chiplets
    return NocResult(tuple(latency), tuple(energy), segments, dies * noc_area(cfg, hw.noc.topology),
                     dies * cfg.nodes * lib["noc_router"].leakage, cfg.frequency)
