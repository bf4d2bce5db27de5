"""Package-level interconnect PHY: drivers, wire timing, area and placement."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .config import ComponentCostLibrary, HardwareConfig, WireParams
from .interconnect.mesh import MeshConfig
from .interconnect.trace import nop_transfers
from .mapping import ACCUMULATOR, MappingResult


class BandwidthClamped(UserWarning):
    pass


# ---------------------------------------------------------------------------
# driver energy
# ---------------------------------------------------------------------------

def transfer_bits(packets: int, hw: HardwareConfig) -> int:
    if hw.nop.energy_mode == "bus_bits":
        return packets * hw.nop.channel_width
    return packets * hw.activation_precision


def driver_energy_per_layer(mapping: MappingResult, net, hw: HardwareConfig) -> list:
    """TX/RX energy (pJ) per layer; each source-destination pair pays its own bits."""
    out = [0.0] * len(mapping.per_layer)
    for tr in nop_transfers(mapping, net, hw):
        pairs = len(tr.sources) * len(tr.dests)
        out[tr.layer] += pairs * transfer_bits(tr.packets, hw) * hw.nop.energy_per_bit
    return out


def driver_energy(mapping: MappingResult, net, hw: HardwareConfig) -> float:
    return sum(driver_energy_per_layer(mapping, net, hw))


# ---------------------------------------------------------------------------
# wire timing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WireTiming:
    delay: float            # s
    max_bandwidth: float    # Hz per lane
    effective: float        # Hz per lane
    clamped: bool

    def as_dict(self):
        return {"delay_s": self.delay, "max_bandwidth_hz": self.max_bandwidth,
                "effective_bandwidth_hz": self.effective, "clamped": self.clamped}


def clamp_message(target: float, max_bw: float) -> str:
    return f"NoP target {target:.4g} Hz exceeds wire limit {max_bw:.4g} Hz; clamped"


def wire_timing(wire: WireParams, target: float, warn=True) -> WireTiming:
    r_total = wire.resistance_per_mm * wire.length_mm
    c_total = wire.capacitance_per_mm * 1e-15 * wire.length_mm
    delay = 0.69 * r_total * c_total
    max_bw = math.inf if delay == 0 else 1.0 / (2.0 * delay)
    effective = min(target, max_bw)
    clamped = effective < target
    if clamped and warn:
        warnings.warn(clamp_message(target, max_bw), BandwidthClamped, stacklevel=2)
    return WireTiming(delay, max_bw, effective, clamped)


# ---------------------------------------------------------------------------
# placement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Placement:
    cols: int
    rows: int
    coords: tuple                 # (x, y) per chiplet id
    accumulator: tuple = None     # (x, y) or None when no layer is split

    @property
    def node_of(self) -> dict:
        out = {c: y * self.cols + x for c, (x, y) in enumerate(self.coords)}
        if self.accumulator is not None:
            x, y = self.accumulator
            out[ACCUMULATOR] = y * self.cols + x
        return out

    def occupied(self) -> list:
        pts = list(self.coords)
        if self.accumulator is not None:
            pts.append(self.accumulator)
        return pts

    def links(self) -> int:
        pts = set(self.occupied())
        return sum((x + 1, y) in pts for x, y in pts) + sum((x, y + 1) in pts for x, y in pts)


def serpentine(slot: int, cols: int):
    y, x = divmod(slot, cols)
    return (x, y) if y % 2 == 0 else (cols - 1 - x, y)


def place_chiplets(n: int, accumulator=False) -> Placement:
    """Boustrophedon placement so consecutive chiplet ids are grid neighbours.

    The accumulator, when requested, takes the next serpentine slot after the
    last chiplet, on the edge of the grid.
    """
    cols = max(1, math.ceil(math.sqrt(n)))
    slots = n + (1 if accumulator else 0)
    rows = max(1, math.ceil(slots / cols))
    coords = tuple(serpentine(i, cols) for i in range(n))
    acc = serpentine(n, cols) if accumulator else None
    return Placement(cols, rows, coords, acc)


def placement_for(mapping: MappingResult) -> Placement:
    split = any(lm.chiplet_count > 1 for lm in mapping.per_layer)
    return place_chiplets(mapping.available_chiplets, accumulator=split)


# ---------------------------------------------------------------------------
# area and mesh parameters
# ---------------------------------------------------------------------------

def nop_fixed_area(hw: HardwareConfig, lib: ComponentCostLibrary) -> float:
    """Per-chiplet NoP area that sits on the chiplet die (TX/RX, clocking, router)."""
    return hw.nop.txrx_area + hw.nop.clocking_area + lib["nop_router"].area


def wiring_area_per_link(hw: HardwareConfig) -> float:
    w = hw.nop.wire
    # both directions, each signal track paired with shielding
    return 2 * hw.nop.channel_width * hw.nop.shielding_tracks * w.pitch_um * w.length_mm * 1000.0


def nop_area(chiplets: int, placement: Placement, hw: HardwareConfig, lib: ComponentCostLibrary) -> dict:
    drivers = chiplets * hw.nop.txrx_area
    clocking = chiplets * hw.nop.clocking_area
    routers = chiplets * lib["nop_router"].area
    wiring = placement.links() * wiring_area_per_link(hw)
    return {"drivers": drivers, "clocking": clocking, "routers": routers, "wiring": wiring,
            "total": drivers + clocking + routers + wiring}


def nop_mesh_config(placement: Placement, hw: HardwareConfig, lib: ComponentCostLibrary,
                    frequency: float) -> MeshConfig:
    nop = hw.nop
    return MeshConfig(
        width=placement.cols, height=placement.rows, flit_width=nop.channel_width,
        buffer_depth=nop.buffer_depth, router_pipeline=nop.router_pipeline,
        link_latency=nop.link_latency, packet_flits=1, frequency=frequency,
        router_energy_per_flit=lib["nop_router"].energy,
        link_energy_per_bit_per_mm=nop.wire_energy_per_bit_per_mm,
        node_pitch=nop.wire.length_mm, router_area=0.0, link_area_per_mm=0.0,
        watchdog_cycles=hw.noc.watchdog_cycles,
    )
