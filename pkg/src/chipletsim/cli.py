"""Command line front end: ``sim run | map | trace | cost | sweep``.

Failures print one JSON object on stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import HardwareConfig, parse_config, parse_network
from .cost import (WAFER_PRESETS, WaferSpec, architecture_cost, chips_per_wafer, chips_per_wafer_raw,
                   compare_costs, cost_per_good_die, normalized_cost, yield_)
from .errors import SimError
from .interconnect.mesh import MeshConfig, simulate
from .interconnect.trace import noc_mesh_shape, noc_segments, nop_segments, read_trace, write_trace
from .mapping import mapping_csv, mapping_summary, partition_network
from .nop import placement_for
from .pipeline import SWEEP_AXES, report_json, run_pipeline, sweep, sweep_csv


def _hw(path) -> HardwareConfig:
    return parse_config(path) if path else HardwareConfig()


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _floats(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_run(args):
    hw = _hw(args.config)
    if args.include_dram:
        hw = replace(hw, dram=replace(hw.dram, include_in_totals=True))
    report = run_pipeline(args.network, hw, serial=args.serial)
    _emit(report_json(report) + "\n", args.out)


def cmd_map(args):
    net, hw = parse_network(args.network), _hw(args.config)
    mapping = partition_network(net, hw)
    if args.format == "csv":
        _emit(mapping_csv(mapping), args.out)
    else:
        _emit(json.dumps(mapping_summary(mapping), sort_keys=True, indent=2) + "\n", args.out)


def cmd_trace(args):
    if args.replay:
        events = read_trace(args.replay)
        if args.mesh:
            w, h = (int(v) for v in args.mesh.lower().split("x"))
        else:
            n = int(events[:, :2].max()) + 1 if len(events) else 1
            w, h = noc_mesh_shape(n)
        hw = _hw(args.config)
        cfg = MeshConfig(w, h, flit_width=hw.noc.flit_width, buffer_depth=hw.noc.buffer_depth,
                         router_pipeline=hw.noc.router_pipeline, link_latency=hw.noc.link_latency,
                         packet_flits=hw.noc.packet_flits, watchdog_cycles=hw.noc.watchdog_cycles)
        stats = simulate(events, cfg)
        _emit(json.dumps({"mesh": [w, h], **stats.as_dict()}, sort_keys=True, indent=2) + "\n", None)
        return
    if not args.network or not args.out_dir:
        raise ValueError("trace needs --network and --out-dir, or --replay")
    net, hw = parse_network(args.network), _hw(args.config)
    mapping = partition_network(net, hw)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for (chip, layer), ev in noc_segments(mapping, net, hw).items():
        name = f"noc_c{chip}_l{layer}.trace"
        write_trace(out / name, ev)
        index.append({"file": name, "kind": "noc", "chiplet": chip, "layer": net[layer].name,
                      "packets": len(ev)})
    if mapping.mode != "monolithic":
        placement = placement_for(mapping)
        for (layer, kind), ev in nop_segments(mapping, net, hw, placement.node_of).items():
            name = f"nop_l{layer}_{kind}.trace"
            write_trace(out / name, ev)
            index.append({"file": name, "kind": "nop", "segment": kind, "layer": net[layer].name,
                          "packets": len(ev), "mesh": [placement.cols, placement.rows]})
    (out / "index.json").write_text(json.dumps(index, indent=2) + "\n")
    print(f"wrote {len(index)} trace files to {out}")


def cmd_cost(args):
    wafer = WAFER_PRESETS.get(args.wafer) or WaferSpec(float(args.wafer))
    if args.defect_density is not None:
        wafer = replace(wafer, defect_density=args.defect_density)
    if args.network:
        net, hw = parse_network(args.network), _hw(args.config)
        mapping = partition_network(net, hw)
        result = architecture_cost(mapping, hw, wafer).as_dict()
        _emit(json.dumps(result, sort_keys=True, indent=2) + "\n", args.out)
        return
    if args.report:
        report = json.loads(Path(args.report).read_text())
        c, cfg = report["cost"], report["config"]
        packaging = 0.0 if cfg["chip_mode"] == "monolithic" else cfg["packaging_cost_fraction"]
        result = compare_costs(c["chiplet_area"], c["chiplet_count"], c["monolithic_area"], wafer, packaging)
        _emit(json.dumps(result.as_dict(), sort_keys=True, indent=2) + "\n", args.out)
        return
    if args.areas:
        areas = _floats(args.areas)
    else:
        lo, hi, step = _floats(args.range.replace(":", ","))
        areas = list(np.arange(lo, hi + step / 2, step))
    ref = args.ref_area if args.ref_area is not None else areas[0]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["area_mm2", "dies_per_wafer", "dies_per_wafer_raw", "yield", "cost_per_good_die", "c_norm"])
    for a in areas:
        a = float(a)
        w.writerow([repr(a), chips_per_wafer(wafer.diameter, a), repr(chips_per_wafer_raw(wafer.diameter, a)),
                    repr(yield_(wafer.defect_density, a)), repr(cost_per_good_die(a, wafer)),
                    repr(normalized_cost(ref, a, wafer))])
    _emit(buf.getvalue(), args.out)


def cmd_sweep(args):
    values = [int(v) for v in args.values.split(",") if v.strip()]
    rows = sweep(args.network, _hw(args.config), args.axis, values, serial=args.serial)
    _emit(sweep_csv(rows), args.out)


def build_parser():
    ap = argparse.ArgumentParser(prog="sim", description="Chiplet IMC accelerator simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full simulation, JSON report")
    p.add_argument("--network", required=True, help="layer table (CSV)")
    p.add_argument("--config", help="hardware config (INI); defaults when omitted")
    p.add_argument("--out", help="report path (stdout when omitted)")
    p.add_argument("--include-dram", action="store_true", help="add the DRAM weight load to the totals")
    p.add_argument("--serial", action="store_true", help="run engines one after another")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("map", help="mapping only")
    p.add_argument("--network", required=True)
    p.add_argument("--config")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("trace", help="write NoC/NoP traces, or replay one trace file")
    p.add_argument("--network")
    p.add_argument("--config")
    p.add_argument("--out-dir")
    p.add_argument("--replay", help="trace file of 'source destination timestamp' lines")
    p.add_argument("--mesh", help="WxH for --replay (smallest square-ish mesh when omitted)")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("cost", help="die cost table over areas, or chiplet vs monolithic for a network")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--areas", help="comma-separated die areas in mm^2")
    g.add_argument("--range", help="start:stop:step in mm^2")
    g.add_argument("--network", help="compare chiplet and monolithic cost for a mapped network")
    g.add_argument("--report", help="recompute the comparison from a `sim run` report")
    p.add_argument("--config")
    p.add_argument("--wafer", default="300mm", help="300mm, 152.4mm or a diameter in mm")
    p.add_argument("--defect-density", type=float, default=None, help="defects per mm^2")
    p.add_argument("--ref-area", type=float, default=None, help="reference area for c_norm (first area)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("sweep", help="one run per value of a hardware axis, CSV rows")
    p.add_argument("--network", required=True)
    p.add_argument("--config")
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", required=True, help="comma-separated integers")
    p.add_argument("--serial", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SimError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
