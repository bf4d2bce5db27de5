"""Trace generation for the NoC (per chiplet) and the NoP (package level).

A trace is an ``(E, 3)`` int64 array of ``(source, destination, timestamp)``
rows. For one layer pair the events are enumerated packet by packet, then
source by source, then destination by destination; the timestamp advances
once per destination and once more after each source, and restarts at zero
for every layer pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import HardwareConfig
from ..errors import MalformedRow
from ..mapping import ACCUMULATOR, MappingResult, layer_consumers, output_activations, source_nodes


def packet_count(activations: float, bits: int, width: int) -> int:
    return math.ceil(activations * bits / width)


def pair_events(sources, destinations, n_packets: int) -> np.ndarray:
    """Events for one layer pair, timestamps starting at 0."""
    src = np.asarray(sources, dtype=np.int64)
    dst = np.asarray(destinations, dtype=np.int64)
    ns, nd = len(src), len(dst)
    if n_packets <= 0 or ns == 0 or nd == 0:
        return np.zeros((0, 3), dtype=np.int64)
    n = np.arange(n_packets, dtype=np.int64)[:, None, None]
    si = np.arange(ns, dtype=np.int64)[None, :, None]
    di = np.arange(nd, dtype=np.int64)[None, None, :]
    k = n * (ns * (nd + 1)) + si * (nd + 1) + di
    out = np.empty((n_packets, ns, nd, 3), dtype=np.int64)
    out[..., 0] = src[si]
    out[..., 1] = dst[di]
    out[..., 2] = k
    out = out.reshape(-1, 3)
    return out[out[:, 0] != out[:, 1]]


def merge(traces) -> np.ndarray:
    """Concatenate traces and order by timestamp, keeping generation order on ties."""
    traces = [t for t in traces if len(t)]
    if not traces:
        return np.zeros((0, 3), dtype=np.int64)
    allev = np.concatenate(traces)
    return allev[np.argsort(allev[:, 2], kind="stable")]


# ---------------------------------------------------------------------------
# NoC: layer pairs that live on the same chiplet
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NocTransfer:
    chiplet: int
    layer: int
    consumer: int
    source_tiles: tuple   # (first, last + 1)
    dest_tiles: tuple
    packets: int


def noc_transfers(mapping: MappingResult, net, hw: HardwareConfig) -> list:
    out = []
    consumers = layer_consumers(net)
    for lm in mapping.per_layer:
        if lm.chiplet_count != 1:
            continue
        chip = lm.chiplet_ids[0]
        layer = net[lm.layer_index]
        n_p = packet_count(layer.input_activations * (1.0 - layer.sparsity),
                           hw.activation_precision, hw.noc.flit_width)
        for j in consumers[lm.layer_index]:
            cm = mapping.per_layer[j]
            if chip not in cm.chiplet_ids:
                continue
            dest = cm.tile_range_per_chiplet[cm.chiplet_ids.index(chip)]
            out.append(NocTransfer(chip, lm.layer_index, j, lm.tile_range_per_chiplet[0], dest, n_p))
    return out


def noc_mesh_shape(tiles: int):
    cols = math.ceil(math.sqrt(tiles))
    return cols, math.ceil(tiles / cols)


def noc_segments(mapping: MappingResult, net, hw: HardwareConfig) -> dict:
    """``{(chiplet, layer): events}`` with node id = tile index on the chiplet."""
    grouped = {}
    for tr in noc_transfers(mapping, net, hw):
        ev = pair_events(range(*tr.source_tiles), range(*tr.dest_tiles), tr.packets)
        grouped.setdefault((tr.chiplet, tr.layer), []).append(ev)
    return {key: merge(evs) for key, evs in sorted(grouped.items())}


# ---------------------------------------------------------------------------
# NoP: chiplet-to-chiplet and chiplet-to-accumulator traffic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NopTransfer:
    layer: int
    kind: str          # "partial" (chiplets -> accumulator) or "outbound"
    sources: tuple     # chiplet ids, ACCUMULATOR for the global accumulator
    dests: tuple
    packets: int       # per source-destination pair


def nop_transfers(mapping: MappingResult, net, hw: HardwareConfig) -> list:
    out = []
    consumers = layer_consumers(net)
    W = hw.nop.channel_width
    Q = hw.activation_precision
    for lm in mapping.per_layer:
        i = lm.layer_index
        layer = net[i]
        if lm.chiplet_count > 1:
            # partial sums are dense regardless of activation sparsity
            n_p = packet_count(output_activations(net, i), Q, W)
            out.append(NopTransfer(i, "partial", lm.chiplet_ids, (ACCUMULATOR,), n_p))
        src = source_nodes(lm)
        n_p = packet_count(layer.input_activations * (1.0 - layer.sparsity), Q, W)
        for j in consumers[i]:
            dests = tuple(c for c in mapping.per_layer[j].chiplet_ids if c not in src)
            if dests:
                out.append(NopTransfer(i, "outbound", src, dests, n_p))
    return out


def nop_segments(mapping: MappingResult, net, hw: HardwareConfig, node_of) -> dict:
    """``{(layer, kind): events}`` with chiplets translated by ``node_of``."""
    grouped = {}
    for tr in nop_transfers(mapping, net, hw):
        ev = pair_events([node_of[s] for s in tr.sources], [node_of[d] for d in tr.dests], tr.packets)
        grouped.setdefault((tr.layer, tr.kind), []).append(ev)
    order = {"partial": 0, "outbound": 1}
    return {key: merge(evs) for key, evs in sorted(grouped.items(), key=lambda kv: (kv[0][0], order[kv[0][1]]))}


# ---------------------------------------------------------------------------
# trace files
# ---------------------------------------------------------------------------

def write_trace(path, events: np.ndarray):
    with open(path, "w") as fh:
        for s, d, k in np.asarray(events).tolist():
            fh.write(f"{s} {d} {k}\n")


def read_trace(path) -> np.ndarray:
    rows = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 3:
            raise MalformedRow("expected 'source destination timestamp'", n)
        try:
            rows.append([int(p) for p in parts])
        except ValueError:
            raise MalformedRow("non-integer field", n) from None
    return np.asarray(rows, dtype=np.int64).reshape(-1, 3)
