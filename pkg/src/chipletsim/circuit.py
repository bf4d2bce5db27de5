"""Bottom-up area/energy/latency of the compute circuits.

Costs are linear compositions of the per-component constants in the
component library: a crossbar unit (array + ADCs + mux + shift-add), a tile
(crossbars + buffer + accumulator), a chiplet (tiles + pooling + activation)
and the package-level accumulator/buffer used when a layer is split.

Units: area um^2, energy pJ, latency ns, leakage uW.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ComponentCostLibrary, HardwareConfig, LayerSpec
from .mapping import LayerMapping, MappingResult


@dataclass(frozen=True)
class PerfTriple:
    area: float = 0.0
    energy: float = 0.0
    latency: float = 0.0

    def __add__(self, other):
        return PerfTriple(self.area + other.area, self.energy + other.energy, self.latency + other.latency)

    def as_dict(self):
        return {"area": self.area, "energy": self.energy, "latency": self.latency}


@dataclass(frozen=True)
class LayerCircuit:
    """One layer's cost split into the compute (crossbar) part and the rest."""

    crossbar: PerfTriple
    periphery: PerfTriple

    @property
    def total(self) -> PerfTriple:
        return self.crossbar + self.periphery


@dataclass(frozen=True)
class CircuitReport:
    per_layer: tuple
    per_chiplet: tuple
    global_accumulator: PerfTriple
    global_buffer: PerfTriple
    global_per_layer: tuple      # PerfTriple per layer for accumulator + buffer
    leakage_power: float         # uW, whole architecture
    totals: PerfTriple           # dynamic; leakage is charged once total latency is known

    def leakage_energy(self, latency_ns: float) -> float:
        # uW * ns = 1e-15 J = 1e-3 pJ
        return self.leakage_power * latency_ns * 1e-3


def adcs_per_crossbar(hw: HardwareConfig) -> int:
    return hw.crossbar_cols // hw.columns_per_adc


def estimate_crossbar_unit(hw: HardwareConfig, lib: ComponentCostLibrary) -> PerfTriple:
    """Cost of one crossbar with its read-out periphery for one input vector read."""
    array, adc, mux, sa = lib["crossbar_cell_array"], lib["adc"], lib["column_mux"], lib["shift_add"]
    area = array.area + adc.area * adcs_per_crossbar(hw) + mux.area + sa.area
    row_steps = hw.crossbar_rows if hw.readout_mode == "sequential" else 1
    conversions = hw.crossbar_cols * row_steps
    energy = array.energy + (adc.energy + mux.energy + sa.energy) * conversions
    # one array access, then the muxed columns share each ADC in turn
    read = array.latency + hw.columns_per_adc * adc.latency + sa.latency
    return PerfTriple(area, energy, read * row_steps)


def unit_leakage(hw: HardwareConfig, lib: ComponentCostLibrary) -> float:
    return (lib["crossbar_cell_array"].leakage + lib["adc"].leakage * adcs_per_crossbar(hw)
            + lib["column_mux"].leakage + lib["shift_add"].leakage)


def tile_area(hw: HardwareConfig, lib: ComponentCostLibrary) -> float:
    unit = estimate_crossbar_unit(hw, lib)
    return hw.crossbars_per_tile * unit.area + lib["tile_buffer"].area + lib["tile_accumulator"].area


def chiplet_area(hw: HardwareConfig, lib: ComponentCostLibrary, tiles: int) -> float:
    return tiles * tile_area(hw, lib) + lib["pooling_unit"].area + lib["activation_unit"].area


def activation_passes(layer: LayerSpec, hw: HardwareConfig) -> float:
    # input vectors presented to the arrays, one bit per pass
    return layer.input_vectors * hw.activation_precision


def estimate_layer_circuit(lm: LayerMapping, layer: LayerSpec, hw: HardwareConfig,
                           lib: ComponentCostLibrary) -> LayerCircuit:
    unit = estimate_crossbar_unit(hw, lib)
    passes = activation_passes(layer, hw)
    keep = 1.0 - layer.sparsity
    outputs = layer.computed_outputs

    xbar_area = lm.allocated_tiles * hw.crossbars_per_tile * unit.area
    xbar_energy = lm.total_crossbars * unit.energy * passes * keep
    # all crossbars of the layer fire in parallel
    xbar_latency = passes * unit.latency

    buf, acc, act, pool = lib["tile_buffer"], lib["tile_accumulator"], lib["activation_unit"], lib["pooling_unit"]
    energy = buf.energy * layer.input_activations
    energy += acc.energy * (lm.rows_of_crossbars - 1) * outputs
    energy += act.energy * outputs
    latency = buf.latency + acc.latency + act.latency
    if layer.has_pool:
        energy += pool.energy * outputs
        latency += pool.latency
    area = lm.allocated_tiles * (buf.area + acc.area)
    return LayerCircuit(PerfTriple(xbar_area, xbar_energy, xbar_latency),
                        PerfTriple(area, energy * keep, latency))


def global_layer_cost(adds: int, accesses: int, hw: HardwareConfig, lib: ComponentCostLibrary):
    """(accumulator, buffer) energy/latency for one layer's partial-sum reduction."""
    if adds == 0 and accesses == 0:
        return PerfTriple(), PerfTriple()
    cycle_ns = 1e9 / hw.clock_frequency
    width = hw.global_accumulator_width
    acc = PerfTriple(0.0, adds * lib["global_accumulator_per_add"].energy,
                     math.ceil(adds / width) * cycle_ns)
    buf = PerfTriple(0.0, accesses * lib["global_buffer_per_access"].energy,
                     math.ceil(accesses / width) * cycle_ns)
    return acc, buf


def estimate_global(mapping: MappingResult, hw: HardwareConfig, lib: ComponentCostLibrary):
    """Package-level accumulator and buffer: per-layer costs plus their summed triples."""
    per_layer = []
    acc_total, buf_total = PerfTriple(), PerfTriple()
    for adds, accesses in zip(mapping.accumulator_adds_per_layer, mapping.global_buffer_accesses_per_layer):
        acc, buf = global_layer_cost(adds, accesses, hw, lib)
        per_layer.append(acc + buf)
        acc_total += acc
        buf_total += buf
    if mapping.mode != "monolithic":
        acc_total += PerfTriple(lib["global_accumulator_per_add"].area, 0.0, 0.0)
        buf_total += PerfTriple(lib["global_buffer_per_access"].area, 0.0, 0.0)
    return acc_total, buf_total, tuple(per_layer)


def die_count(mapping: MappingResult) -> int:
    return mapping.available_chiplets


def estimate_circuit(mapping: MappingResult, net, hw: HardwareConfig,
                     lib: ComponentCostLibrary = None) -> CircuitReport:
    lib = lib if lib is not None else hw.components
    per_layer = tuple(estimate_layer_circuit(lm, net[lm.layer_index], hw, lib) for lm in mapping.per_layer)
    acc, buf, global_per_layer = estimate_global(mapping, hw, lib)

    dies = die_count(mapping)
    die = chiplet_area(hw, lib, mapping.tiles_per_chiplet)
    per_chiplet = []
    for c in range(dies):
        energy = latency = 0.0
        for lm, lc in zip(mapping.per_layer, per_layer):
            if c in lm.chiplet_ids:
                share = lm.crossbars_per_chiplet[lm.chiplet_ids.index(c)] / lm.total_crossbars
                energy += lc.total.energy * share
                latency += lc.total.latency
        per_chiplet.append(PerfTriple(die, energy, latency))

    area = dies * die + acc.area + buf.area
    energy = latency = 0.0
    for lc, g in zip(per_layer, global_per_layer):
        energy += lc.total.energy + g.energy
        latency += lc.total.latency + g.latency

    tile_leak = (hw.crossbars_per_tile * unit_leakage(hw, lib)
                 + lib["tile_buffer"].leakage + lib["tile_accumulator"].leakage)
    die_leak = mapping.tiles_per_chiplet * tile_leak + lib["pooling_unit"].leakage + lib["activation_unit"].leakage
    leak = dies * die_leak
    if mapping.mode != "monolithic":
        leak += lib["global_accumulator_per_add"].leakage + lib["global_buffer_per_access"].leakage

    return CircuitReport(
        per_layer=per_layer, per_chiplet=tuple(per_chiplet),
        global_accumulator=acc, global_buffer=buf, global_per_layer=global_per_layer,
        leakage_power=leak, totals=PerfTriple(area, energy, latency),
    )
