"""End-to-end run: mapping, concurrent engines, layer-sequential dataflow, report.

Per layer ``i`` the dataflow charges

    compute_i + NoC_i [+ NoP partial sums + accumulation when split] + NoP to consumers

and layers run strictly one after another (batch size 1).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .circuit import estimate_circuit
from .config import HardwareConfig, config_to_dict, parse_config, parse_network, validate_config
from .cost import architecture_cost
from .dram import DramEstimate, estimate_chunked, model_size
from .errors import SimError
from .interconnect.mesh import simulate
from .interconnect.trace import nop_segments
from .mapping import MappingResult, mapping_summary, partition_network
from .noc import NocResult, run_noc
from .nop import (clamp_message, driver_energy_per_layer, nop_area, nop_mesh_config,
                  placement_for, wire_timing)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NopResult:
    partial_latency: tuple      # ns per layer, chiplets -> accumulator
    outbound_latency: tuple     # ns per layer, to the consuming chiplets
    sim_energy: tuple           # pJ per layer, routers and wires
    driver_energy: tuple        # pJ per layer, TX/RX
    segments: dict
    area: dict                  # um^2 breakdown
    timing: dict
    leakage_power: float        # uW
    placement: dict

    @property
    def latency(self) -> float:
        return sum(self.partial_latency) + sum(self.outbound_latency)

    @property
    def energy(self) -> float:
        return sum(self.sim_energy) + sum(self.driver_energy)

    def summary(self) -> dict:
        segs = list(self.segments.values())
        return {
            "segments": len(segs),
            "packets_injected": sum(s.packets_injected for s in segs),
            "packets_ejected": sum(s.packets_ejected for s in segs),
            "flit_hops": sum(s.flit_hops for s in segs),
            "latency_ns": self.latency,
            "router_wire_energy_pj": sum(self.sim_energy),
            "driver_energy_pj": sum(self.driver_energy),
            "energy_pj": self.energy,
            "area_um2": self.area,
            "wire_timing": self.timing,
            "placement": self.placement,
        }


def run_nop(mapping: MappingResult, net, hw: HardwareConfig, lib=None) -> NopResult:
    lib = lib if lib is not None else hw.components
    n = len(mapping.per_layer)
    zeros = (0.0,) * n
    if mapping.mode == "monolithic":
        return NopResult(zeros, zeros, zeros, zeros, {}, {"total": 0.0}, {}, 0.0, {})
    # engines run on worker threads: record the clamp instead of touching the warnings filters
    timing = wire_timing(hw.nop.wire, hw.nop.frequency, warn=False)
    placement = placement_for(mapping)
    cfg = nop_mesh_config(placement, hw, lib, timing.effective)
    cycle_ns = 1e9 / cfg.frequency
    partial, outbound, energy = [0.0] * n, [0.0] * n, [0.0] * n
    segments = {}
    for (layer, kind), events in nop_segments(mapping, net, hw, placement.node_of).items():
        stats = simulate(events, cfg)
        segments[(layer, kind)] = stats
        target = partial if kind == "partial" else outbound
        target[layer] += stats.total_latency * cycle_ns
        energy[layer] += stats.energy
    chiplets = mapping.available_chiplets
    timing_d = timing.as_dict()
    timing_d["warnings"] = [clamp_message(hw.nop.frequency, timing.max_bandwidth)] if timing.clamped else []
    place_d = {"cols": placement.cols, "rows": placement.rows,
               "chiplets": [list(c) for c in placement.coords],
               "accumulator": list(placement.accumulator) if placement.accumulator else None}
    return NopResult(tuple(partial), tuple(outbound), tuple(energy),
                     tuple(driver_energy_per_layer(mapping, net, hw)), segments,
                     nop_area(chiplets, placement, hw, lib), timing_d,
                     chiplets * lib["nop_router"].leakage, place_d)


def run_dram(net, hw: HardwareConfig) -> DramEstimate:
    return estimate_chunked(model_size(net), hw.weight_precision, hw.dram)


def _load(network, config):
    net = parse_network(network) if isinstance(network, (str, Path)) else list(network)
    if isinstance(config, (str, Path)):
        hw = parse_config(config)
    else:
        hw = config if config is not None else HardwareConfig()
        validate_config(hw)
    return net, hw


def run_engines(mapping, net, hw, serial=False):
    """Circuit, NoC, NoP and DRAM engines over one immutable mapping."""
    jobs = {
        "circuit": lambda: estimate_circuit(mapping, net, hw),
        "noc": lambda: run_noc(mapping, net, hw),
        "nop": lambda: run_nop(mapping, net, hw),
        "dram": lambda: run_dram(net, hw),
    }
    if serial:
        return {k: f() for k, f in jobs.items()}
    with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
        futures = {k: pool.submit(f) for k, f in jobs.items()}
        return {k: fut.result() for k, fut in futures.items()}


def dataflow(mapping: MappingResult, net, hw: HardwareConfig, results: dict) -> list:
    """Per-layer latency/energy rows following the layer-sequential dataflow."""
    circuit, noc, nop = results["circuit"], results["noc"], results["nop"]
    rows = []
    n = len(mapping.per_layer)
    for i, lm in enumerate(mapping.per_layer):
        lc = circuit.per_layer[i].total
        glob = circuit.global_per_layer[i]
        split = lm.chiplet_count > 1
        nop_out = nop.outbound_latency[i]
        if hw.overlap_nop_compute and i + 1 < n:
            nop_out = max(0.0, nop_out - circuit.per_layer[i + 1].total.latency)
        row = {
            "layer": lm.name,
            "chiplets": lm.chiplet_count,
            "compute_latency": lc.latency,
            "noc_latency": noc.per_layer_latency[i],
            "accumulator_transfer_latency": nop.partial_latency[i] if split else 0.0,
            "accumulation_latency": glob.latency if split else 0.0,
            "nop_latency": nop_out,
            "compute_energy": lc.energy,
            "noc_energy": noc.per_layer_energy[i],
            "accumulation_energy": glob.energy,
            "nop_energy": nop.sim_energy[i] + nop.driver_energy[i],
        }
        row["latency"] = (row["compute_latency"] + row["noc_latency"] + row["accumulator_transfer_latency"]
                          + row["accumulation_latency"] + row["nop_latency"])
        row["energy"] = (row["compute_energy"] + row["noc_energy"] + row["accumulation_energy"]
                         + row["nop_energy"])
        rows.append(row)
    return rows


def assemble_report(mapping, net, hw, results) -> dict:
    circuit, noc, nop, dram = results["circuit"], results["noc"], results["nop"], results["dram"]
    rows = dataflow(mapping, net, hw, results)
    latency = dynamic = 0.0
    for r in rows:
        latency += r["latency"]
        dynamic += r["energy"]
    leak_power = circuit.leakage_power + noc.leakage_power + nop.leakage_power
    leakage = leak_power * latency * 1e-3
    energy = dynamic + leakage
    include_dram = hw.dram.include_in_totals
    if include_dram:
        energy += dram.energy
        latency += dram.latency
    area_um2 = circuit.totals.area + noc.area + nop.area["total"]
    area = area_um2 * 1e-6
    edp = energy * latency
    cost = architecture_cost(mapping, hw)

    noc_lat = sum(r["noc_latency"] for r in rows)
    noc_en = sum(r["noc_energy"] for r in rows)
    nop_lat = sum(r["accumulator_transfer_latency"] + r["nop_latency"] for r in rows)
    nop_en = sum(r["nop_energy"] for r in rows)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config_to_dict(hw),
        "mapping": mapping_summary(mapping),
        "circuit": {
            "area_um2": circuit.totals.area,
            "energy_pj": circuit.totals.energy,
            "latency_ns": circuit.totals.latency,
            "global_accumulator": circuit.global_accumulator.as_dict(),
            "global_buffer": circuit.global_buffer.as_dict(),
            "leakage_power_uw": circuit.leakage_power,
            "per_chiplet": [p.as_dict() for p in circuit.per_chiplet],
        },
        "noc": {**noc.summary(), "latency_ns": noc_lat, "energy_pj": noc_en, "edp": noc_en * noc_lat},
        "nop": {**nop.summary(), "latency_ns": nop_lat, "energy_pj": nop_en, "edp": nop_en * nop_lat},
        "dram": {**dram.as_dict(), "included_in_totals": include_dram},
        "totals": {
            "area_mm2": area,
            "energy_pj": energy,
            "dynamic_energy_pj": dynamic,
            "leakage_energy_pj": leakage,
            "latency_ns": latency,
            "power_mw": energy / latency if latency else 0.0,
            "edp": edp,
            "edap": edp * area,
            "energy_efficiency_inf_per_j": 1e12 / energy if energy else 0.0,
            "utilization": mapping.global_utilization,
        },
        "cost": cost.as_dict(),
        "per_layer": rows,
    }


def run_pipeline(network, config=None, serial=False) -> dict:
    """Full simulation of one network on one configuration; returns the report dict."""
    net, hw = _load(network, config)
    mapping = partition_network(net, hw)
    results = run_engines(mapping, net, hw, serial=serial)
    return assemble_report(mapping, net, hw, results)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

SWEEP_AXES = ("tiles_per_chiplet", "chiplet_count", "crossbar_size")
SWEEP_COLUMNS = (
    "axis", "value", "status", "error", "chiplets", "utilization", "area_mm2", "energy_pj",
    "latency_ns", "edp", "edap", "circuit_energy_pj", "circuit_latency_ns",
    "noc_energy_pj", "noc_latency_ns", "noc_edp", "nop_energy_pj", "nop_latency_ns", "nop_edp",
    "cost_improvement_percent",
)


def apply_axis(hw: HardwareConfig, axis: str, value) -> HardwareConfig:
    if axis == "tiles_per_chiplet":
        new = replace(hw, tiles_per_chiplet=int(value))
    elif axis == "chiplet_count":
        new = replace(hw, chip_mode="chiplet", chiplet_structure="homogeneous", chiplet_count=int(value))
    elif axis == "crossbar_size":
        new = replace(hw, crossbar_rows=int(value), crossbar_cols=int(value),
                      columns_per_adc=math.gcd(hw.columns_per_adc, int(value)))
    else:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    validate_config(new)
    return new


def sweep_row(report: dict, axis, value) -> dict:
    t = report["totals"]
    return {
        "axis": axis, "value": value, "status": "ok", "error": "",
        "chiplets": report["mapping"]["chiplets_used"], "utilization": t["utilization"],
        "area_mm2": t["area_mm2"], "energy_pj": t["energy_pj"], "latency_ns": t["latency_ns"],
        "edp": t["edp"], "edap": t["edap"],
        "circuit_energy_pj": report["circuit"]["energy_pj"], "circuit_latency_ns": report["circuit"]["latency_ns"],
        "noc_energy_pj": report["noc"]["energy_pj"], "noc_latency_ns": report["noc"]["latency_ns"],
        "noc_edp": report["noc"]["edp"],
        "nop_energy_pj": report["nop"]["energy_pj"], "nop_latency_ns": report["nop"]["latency_ns"],
        "nop_edp": report["nop"]["edp"],
        "cost_improvement_percent": report["cost"]["improvement_percent"],
    }


def sweep(network, config, axis: str, values, serial=False) -> list:
    """One pipeline run per value, in the given order; failures are kept as rows."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    net, hw = _load(network, config)
    rows = []
    for value in values:
        try:
            point = apply_axis(hw, axis, value)
            rows.append(sweep_row(run_pipeline(net, point, serial=serial), axis, value))
        except SimError as exc:
            rows.append({**{c: "" for c in SWEEP_COLUMNS}, "axis": axis, "value": value,
                         "status": "error", "error": f"{exc.kind}: {exc.message}"})
    return rows


def sweep_csv(rows) -> str:
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return out.getvalue()
