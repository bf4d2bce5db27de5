"""Layer partitioning onto crossbars, tiles and chiplets.

Each layer needs ``N^r x N^c`` crossbars (rows of crossbars cover the
unrolled kernel, columns cover the output features times the cells per
weight). Layers are then placed on chiplets in execution order:

* a layer that fits in the spare tiles of the previous layer's last chiplet
  is packed there (``pack_layers``);
* otherwise it opens ``ceil(N / S)`` fresh chiplets and its tiles are split
  across them as evenly as possible.

The allocation unit is the tile, so every chiplet gets whole tiles and the
crossbar counts per chiplet differ by at most one tile.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .config import HardwareConfig, LayerSpec
from .errors import ChipletBudgetExceeded

# sentinel node id for the package-level accumulator/buffer
ACCUMULATOR = -1


def cells_per_weight(hw: HardwareConfig) -> int:
    return math.ceil(hw.weight_precision / hw.bits_per_cell)


def crossbars_for_layer(layer: LayerSpec, hw: HardwareConfig):
    """Return ``(N^r, N^c, N^Total)`` for one layer."""
    rows = math.ceil(layer.kernel_x * layer.kernel_y * layer.in_features / hw.crossbar_rows)
    cols = math.ceil(layer.out_features * cells_per_weight(hw) / hw.crossbar_cols)
    return rows, cols, rows * cols


@dataclass(frozen=True)
class LayerMapping:
    layer_index: int
    name: str
    rows_of_crossbars: int
    cols_of_crossbars: int
    total_crossbars: int
    chiplet_ids: tuple
    crossbars_per_chiplet: tuple
    tiles_per_chiplet: tuple
    tile_range_per_chiplet: tuple  # (first, last + 1) tile index on each chiplet

    @property
    def chiplet_count(self) -> int:
        return len(self.chiplet_ids)

    @property
    def allocated_tiles(self) -> int:
        return sum(self.tiles_per_chiplet)


@dataclass(frozen=True)
class MappingResult:
    per_layer: tuple
    mode: str                 # "homogeneous", "custom" or "monolithic"
    tiles_per_chiplet: int    # tiles on one die (the whole die in monolithic mode)
    crossbars_per_tile: int
    total_chiplets_used: int
    available_chiplets: int   # C for homogeneous, otherwise total_chiplets_used
    utilization_per_layer: tuple
    global_utilization: float
    intra_chiplet_volume_per_layer: tuple   # bits
    inter_chiplet_volume_per_layer: tuple   # bits
    accumulator_adds_per_layer: tuple
    global_buffer_accesses_per_layer: tuple

    @property
    def chiplet_size(self) -> int:
        return self.tiles_per_chiplet * self.crossbars_per_tile

    @property
    def total_crossbars(self) -> int:
        return sum(m.total_crossbars for m in self.per_layer)

    @property
    def total_tiles(self) -> int:
        return sum(m.allocated_tiles for m in self.per_layer)

    def layers_on_chiplet(self, chiplet: int) -> list:
        return [m.layer_index for m in self.per_layer if chiplet in m.chiplet_ids]


def _split_even(total, parts):
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def _water_fill(total, caps):
    # spread `total` as evenly as possible without exceeding any cap
    order = sorted(range(len(caps)), key=lambda i: (caps[i], i))
    out = [0] * len(caps)
    remaining = total
    for pos, i in enumerate(order):
        share = min(caps[i], math.ceil(remaining / (len(caps) - pos)))
        out[i] = share
        remaining -= share
    assert remaining == 0
    return out


def _place_layers(net, hw: HardwareConfig, tiles_per_die: int, pack: bool):
    cpt = hw.crossbars_per_tile
    S = tiles_per_die * cpt
    used_tiles = []  # tiles occupied on each chiplet so far
    placed = []
    for idx, layer in enumerate(net):
        rows, cols, total = crossbars_for_layer(layer, hw)
        tiles = math.ceil(total / cpt)
        if pack and used_tiles and tiles_per_die - used_tiles[-1] >= tiles:
            chip = len(used_tiles) - 1
            start = used_tiles[-1]
            used_tiles[-1] += tiles
            placed.append(LayerMapping(idx, layer.name, rows, cols, total, (chip,), (total,),
                                       (tiles,), ((start, start + tiles),)))
            continue
        n = math.ceil(total / S)
        tile_split = _split_even(tiles, n)
        xbar_split = _water_fill(total, [t * cpt for t in tile_split])
        first = len(used_tiles)
        used_tiles.extend(tile_split)
        placed.append(LayerMapping(idx, layer.name, rows, cols, total,
                                   tuple(range(first, first + n)), tuple(xbar_split),
                                   tuple(tile_split), tuple((0, t) for t in tile_split)))
    return placed, len(used_tiles)


def layer_consumers(net) -> list:
    """For every layer, the indices of the layers that read its outputs."""
    index = {l.name: i for i, l in enumerate(net)}
    out = [[i + 1] if i + 1 < len(net) else [] for i in range(len(net))]
    for j, layer in enumerate(net):
        for src in layer.input_from:
            i = index[src]
            if j not in out[i]:
                out[i].append(j)
    return out


def source_nodes(lm: LayerMapping) -> tuple:
    """Where a layer's outputs leave from: its own chiplet, or the accumulator when split."""
    return (ACCUMULATOR,) if lm.chiplet_count > 1 else lm.chiplet_ids


def output_activations(net, i: int) -> int:
    return net[i + 1].input_activations if i + 1 < len(net) else net[i].out_features


def traffic_summary(per_layer, net, hw: HardwareConfig):
    """Per-layer (intra bits, inter bits, accumulator adds, global buffer accesses)."""
    consumers = layer_consumers(net)
    intra, inter, adds, accesses = [], [], [], []
    for i, lm in enumerate(per_layer):
        layer = net[i]
        bits = layer.input_activations * hw.activation_precision * (1.0 - layer.sparsity)
        src = set(source_nodes(lm))
        local = remote = 0.0
        for j in consumers[i]:
            dst = set(per_layer[j].chiplet_ids)
            local += bits * len(dst & src)
            remote += bits * len(dst - src)
        intra.append(local)
        inter.append(remote)
        m = lm.chiplet_count
        a_out = output_activations(net, i)
        adds.append(a_out * (m - 1))
        accesses.append((m + 1) * a_out if m > 1 else 0)
    return tuple(intra), tuple(inter), tuple(adds), tuple(accesses)


def utilization(per_layer, used_chiplets: int, available: int, tiles_per_die: int, cpt: int):
    per = tuple(lm.total_crossbars / (lm.allocated_tiles * cpt) for lm in per_layer)
    total = sum(lm.total_crossbars for lm in per_layer)
    return per, total / (available * tiles_per_die * cpt)


def partition_network(net, hw: HardwareConfig) -> MappingResult:
    """Map every layer to crossbars/tiles/chiplets and derive traffic counts."""
    if not net:
        raise ValueError("empty network")
    cpt = hw.crossbars_per_tile
    if hw.chip_mode == "monolithic":
        tiles = sum(math.ceil(crossbars_for_layer(l, hw)[2] / cpt) for l in net)
        per_layer, used = _place_layers(net, hw, tiles, pack=True)
        mode, tiles_per_die, available = "monolithic", tiles, 1
    else:
        tiles_per_die = hw.tiles_per_chiplet
        per_layer, used = _place_layers(net, hw, tiles_per_die, hw.pack_layers)
        mode = hw.chiplet_structure
        available = used
        if mode == "homogeneous":
            available = hw.chiplet_count
            if used > hw.chiplet_count:
                raise ChipletBudgetExceeded(
                    f"network needs {used} chiplets but only {hw.chiplet_count} are available",
                    required=used, available=hw.chiplet_count)
    per_layer = tuple(per_layer)
    util_layers, util_global = utilization(per_layer, used, available, tiles_per_die, cpt)
    intra, inter, adds, accesses = traffic_summary(per_layer, net, hw)
    return MappingResult(
        per_layer=per_layer, mode=mode, tiles_per_chiplet=tiles_per_die, crossbars_per_tile=cpt,
        total_chiplets_used=used, available_chiplets=available,
        utilization_per_layer=util_layers, global_utilization=util_global,
        intra_chiplet_volume_per_layer=intra, inter_chiplet_volume_per_layer=inter,
        accumulator_adds_per_layer=adds, global_buffer_accesses_per_layer=accesses,
    )


def mapping_csv(mapping: MappingResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["layer", "chiplet", "tiles", "crossbars", "utilization"])
    cpt = mapping.crossbars_per_tile
    for lm in mapping.per_layer:
        for chip, tiles, xb in zip(lm.chiplet_ids, lm.tiles_per_chiplet, lm.crossbars_per_chiplet):
            w.writerow([lm.name, chip, tiles, xb, repr(xb / (tiles * cpt))])
    return out.getvalue()


def mapping_summary(mapping: MappingResult) -> dict:
    return {
        "mode": mapping.mode,
        "chiplets_used": mapping.total_chiplets_used,
        "chiplets_available": mapping.available_chiplets,
        "tiles_per_chiplet": mapping.tiles_per_chiplet,
        "crossbars_per_tile": mapping.crossbars_per_tile,
        "total_tiles": mapping.total_tiles,
        "total_crossbars": mapping.total_crossbars,
        "global_utilization": mapping.global_utilization,
        "layers": [
            {
                "name": lm.name,
                "rows_of_crossbars": lm.rows_of_crossbars,
                "cols_of_crossbars": lm.cols_of_crossbars,
                "total_crossbars": lm.total_crossbars,
                "chiplets": list(lm.chiplet_ids),
                "crossbars_per_chiplet": list(lm.crossbars_per_chiplet),
                "tiles_per_chiplet": list(lm.tiles_per_chiplet),
                "tile_ranges": [list(r) for r in lm.tile_range_per_chiplet],
                "utilization": mapping.utilization_per_layer[i],
                "intra_chiplet_bits": mapping.intra_chiplet_volume_per_layer[i],
                "inter_chiplet_bits": mapping.inter_chiplet_volume_per_layer[i],
                "accumulator_adds": mapping.accumulator_adds_per_layer[i],
                "global_buffer_accesses": mapping.global_buffer_accesses_per_layer[i],
            }
            for i, lm in enumerate(mapping.per_layer)
        ],
    }
