"""Independent brute-force oracles used to freeze expected values in tests.

Nothing here imports the engines: the mapping oracle is a straight-line
loop over the layer table, and the contention oracle is a naive cycle-by-cycle
mesh walk whose router state (credits, locks, round-robin pointers) is
re-derived every cycle from a log of past grants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class OracleResult:
    case_id: str
    expected: object
    tolerance: float = 0.0
    provenance: str = "derived"


def _ceil_div(a, b):
    return -(-a // b)


# ---------------------------------------------------------------------------
# mapping
# ---------------------------------------------------------------------------

def mapping_oracle(net, weight_bits=8, rows=128, cols=128, crossbars_per_tile=16, bits_per_cell=1):
    """Total (crossbars, tiles) when every layer gets whole tiles of its own."""
    cells = _ceil_div(weight_bits, bits_per_cell)
    crossbars = tiles = 0
    for layer in net:
        n = _ceil_div(layer.kernel_x * layer.kernel_y * layer.in_features, rows) * \
            _ceil_div(layer.out_features * cells, cols)
        crossbars += n
        tiles += _ceil_div(n, crossbars_per_tile)
    return crossbars, tiles


# ---------------------------------------------------------------------------
# mesh contention
# ---------------------------------------------------------------------------

_DIRS = {1: (1, 0), 2: (-1, 0), 3: (0, 1), 4: (0, -1)}
_OPP = {0: 0, 1: 2, 2: 1, 3: 4, 4: 3}


def contention_oracle(trace, width, height, depth=8, t_r=2, t_l=1, flits=1, max_cycles=100000):
    """Per-packet latencies (trace order) for a small mesh, by exhaustive stepping."""
    events = [tuple(int(v) for v in e) for e in trace]
    if not events:
        return []
    order = sorted(range(len(events)), key=lambda i: events[i][2])

    def coords(node):
        return node % width, node // width

    def neighbour(node, port):
        x, y = coords(node)
        dx, dy = _DIRS[port]
        return (x + dx) + (y + dy) * width

    def route(node, dest):
        (x, y), (tx, ty) = coords(node), coords(dest)
        if tx != x:
            return 1 if tx > x else 2
        if ty != y:
            return 3 if ty > y else 4
        return 0

    # every flit: where it sits and since when it may move
    flit_state = {}
    arrival = 0
    for p in order:
        s, _, ts = events[p]
        for f in range(flits):
            flit_state[(p, f)] = {"at": ("inj", s), "ready": ts + t_r, "seq": (ts, order.index(p), f)}
    log = []  # (cycle, router, input, output, packet, flit)
    finished = {}

    for t in range(max_cycles):
        if len(finished) == len(events):
            break

        def credits(r, o):
            down, port = neighbour(r, o), _OPP[o]
            sent = sum(1 for (_, rr_, _, oo, _, _) in log if rr_ == r and oo == o)
            back = sum(1 for (tt, rr_, ii, _, _, _) in log if rr_ == down and ii == port and tt + t_l <= t)
            return depth - sent + back

        def lock_and_pointer(r, o):
            grants = [g for g in log if g[1] == r and g[3] == o]
            heads = [g for g in grants if g[5] == 0]
            rr_ptr = heads[-1][2] if heads else 4
            if grants and grants[-1][5] != flits - 1:
                return grants[-1][2], rr_ptr
            return None, rr_ptr

        decisions = []
        for r in range(width * height):
            # head flit of every input: lowest sequence among flits parked there
            heads = {}
            for key, st in flit_state.items():
                kind = st["at"]
                if kind[0] == "inj" and kind[1] == r:
                    port = 0
                elif kind[0] == "buf" and kind[1] == r:
                    port = kind[2]
                else:
                    continue
                if port not in heads or st["seq"] < flit_state[heads[port]]["seq"]:
                    heads[port] = key
            ready = {i: k for i, k in heads.items() if flit_state[k]["ready"] <= t}
            taken = set()
            for o in range(5):
                if o != 0 and credits(r, o) <= 0:
                    continue
                locked, rr_ptr = lock_and_pointer(r, o)
                pick = None
                if locked is not None:
                    if locked in ready and locked not in taken:
                        pick = locked
                else:
                    for j in range(1, 6):
                        i = (rr_ptr + j) % 5
                        k = ready.get(i)
                        if k is not None and i not in taken and k[1] == 0 and route(r, events[k[0]][1]) == o:
                            pick = i
                            break
                if pick is not None:
                    taken.add(pick)
                    decisions.append((r, pick, o, ready[pick]))

        for r, i, o, key in decisions:
            p, f = key
            log.append((t, r, i, o, p, f))
            st = flit_state[key]
            if o == 0:
                st["at"] = ("done",)
                if f == flits - 1:
                    finished[p] = t + t_l - events[p][2]
            else:
                arrival += 1
                st["at"] = ("buf", neighbour(r, o), _OPP[o])
                st["ready"] = t + t_l + t_r
                st["seq"] = (t, arrival, 0)
    else:
        raise RuntimeError("oracle did not drain")
    return [finished[p] for p in range(len(events))]


# ---------------------------------------------------------------------------
# hand-derivable examples, recomputed from first principles
# ---------------------------------------------------------------------------

def _dies(D, A):
    return D * math.pi * (D / (4 * A) - 1 / math.sqrt(2 * A))


def derived_cases():
    cases = []
    add = cases.append
    # crossbar counts
    add(OracleResult("crossbars_3x3x64x64", (_ceil_div(576, 128), _ceil_div(512, 128), 5 * 4)))
    add(OracleResult("crossbars_1x1x129x128", (_ceil_div(129, 128), _ceil_div(1024, 128), 2 * 8)))
    # 20 crossbars in tiles of 4 on chiplets of 4 tiles: 5 tiles over 2 chiplets
    add(OracleResult("split_20_tiles", (3, 2)))
    add(OracleResult("split_20_crossbars", (12, 8)))
    add(OracleResult("fanout_volume", 4096 * 8 * 2))
    add(OracleResult("accumulator_adds_m2", 1000 * (2 - 1)))
    add(OracleResult("utilization_20_of_32", 20 / 32))
    add(OracleResult("utilization_homogeneous", 288 / (36 * 16)))
    # circuit
    add(OracleResult("adc_instances", 128 // 8))
    add(OracleResult("adc_serial_conversions", 8))
    add(OracleResult("sequential_latency_factor", 128))
    add(OracleResult("parallel_layer_energy_units", 20))
    add(OracleResult("global_add_energy", 1000 * 0.1, 1e-12))
    add(OracleResult("global_add_latency_ns", _ceil_div(1000, 16) * 1.0))
    # interconnect
    add(OracleResult("packets_4096x8_over_32", _ceil_div(4096 * 8, 32)))
    events = []
    k = 0
    for _ in range(2):
        for s in (0,):
            for d in (1,):
                events.append((s, d, k))
                k += 1
            k += 1
    add(OracleResult("trace_two_packets", events))
    add(OracleResult("zero_load_adjacent", 2 * (2 + 1)))
    add(OracleResult("two_colliding_packets", contention_oracle([(0, 1, 0), (0, 1, 0)], 2, 1)))
    add(OracleResult("mesh_4x4_links", 4 * 3 + 4 * 3))
    add(OracleResult("hops_energy_100", 100 * 1.0))
    # NoP
    add(OracleResult("nop_driver_4096", _ceil_div(4096 * 8, 32) * 8 * 0.54, 1e-9))
    add(OracleResult("wire_max_bw_rc2ns", 1 / (2 * 0.69 * 2e-9), 1e3))
    add(OracleResult("nop_energy_doubling_ratio", 2.0, 1e-12))
    add(OracleResult("wire_10x_length_bandwidth_ratio", 1 / (10 * 10), 1e-12))
    add(OracleResult("grid_2x2_links", 2 * 1 + 2 * 1))
    add(OracleResult("serpentine_4", [(0, 0), (1, 0), (1, 1), (0, 1)]))
    add(OracleResult("serpentine_6_grid", (3, 2)))
    # DRAM
    add(OracleResult("dram_tx_1p7M", _ceil_div(_ceil_div(1_700_000 * 8, 8), 64)))
    add(OracleResult("dram_tx_138M", _ceil_div(_ceil_div(138_000_000 * 8, 8), 64)))
    # tRCD + tCAS + one 4-cycle burst + tRP with DDR4 timings and tRAS below the column path
    add(OracleResult("dram_single_row_cycles", 16 + 16 + 4 + 16))
    add(OracleResult("dram_doubling_ratio", 2.0, 2e-3))
    add(OracleResult("dram_chunk_tenth_bound", 0.05))
    # cost
    add(OracleResult("dies_152_296", math.floor(_dies(152.4, 296))))
    add(OracleResult("dies_152_74", math.floor(_dies(152.4, 74))))
    add(OracleResult("yield_296", math.exp(-0.012 * 296), 1e-4))
    add(OracleResult("yield_74", math.exp(-0.012 * 74), 1e-4))
    add(OracleResult("cnorm_296_74",
                     _dies(152.4, 296) / _dies(152.4, 74) * math.exp(-0.012 * (296 - 74)), 1e-3))
    add(OracleResult("cnorm_identity_digits", 10))
    # orchestrator: a split layer vs. the same network on chiplets twice as large
    add(OracleResult("split_removed_adds_and_nop", (0, 0.0)))
    return {c.case_id: c for c in cases}
