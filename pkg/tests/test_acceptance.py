"""Acceptance suite: one PASS/FAIL line per criterion.

Each criterion is one test. Its verdict line is printed as the test runs
(visible with ``-s``) and repeated in the terminal summary by conftest.py.

    pytest tests/test_acceptance.py -v
"""
import json
import time
from dataclasses import replace

import numpy as np
import pytest

from chipletsim.cli import main as cli_main
from chipletsim.config import HardwareConfig, LayerSpec
from chipletsim.cost import (WAFER_300MM, WAFER_6IN, chips_per_wafer, chips_per_wafer_raw, cost_per_good_die,
                             normalized_cost, yield_)
from chipletsim.dram import estimate_chunked
from chipletsim.errors import ChipletBudgetExceeded
from chipletsim.interconnect.mesh import MeshConfig, simulate
from chipletsim.mapping import crossbars_for_layer, partition_network
from chipletsim.oracles import contention_oracle
from chipletsim.pipeline import report_json, run_pipeline, sweep

from conftest import CONFIGS, FIXTURES

RESULTS = {}


def verdict(n, checks, title):
    """Record and print the criterion line, then fail the test if any check failed."""
    ok = all(passed for _, passed in checks)
    detail = "; ".join(f"{'ok' if passed else 'FAILED'} {text}" for text, passed in checks)
    line = f"CRITERION {n:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def test_criterion_01_mapping_counts(fixture_net):
    hw = HardwareConfig()   # 8-bit weights, 128x128 crossbars, 16 crossbars per tile
    checks = []
    for name, target, tol in (("resnet50_imagenet", 802, 0.02 * 802), ("lenet5_mnist", 43, 2),
                              ("densenet110_cifar10", 2184, 0.02 * 2184)):
        m, dt = timed(partition_network, fixture_net(name), hw)
        tiles = m.total_tiles
        checks.append((f"{name} {tiles} tiles (target {target} +-{tol:g})", abs(tiles - target) <= tol))
        checks.append((f"{name} {dt:.3f}s < 1s", dt < 1.0))
    verdict(1, checks, "mapping counts")


def test_criterion_02_ceiling_bounds():
    rng = np.random.default_rng(1)
    base = HardwareConfig()
    hws = [replace(base, crossbar_rows=px, crossbar_cols=py, weight_precision=b, bits_per_cell=c, columns_per_adc=1)
           for px in (32, 64, 128, 256, 512) for py in (32, 64, 128, 256) for b, c in ((8, 1), (8, 2), (4, 1), (16, 4))]
    t0 = time.perf_counter()
    bad = 0
    for i in range(10_000):
        hw = hws[int(rng.integers(len(hws)))]
        k = int(rng.integers(1, 12))
        nif, nof = (int(v) for v in rng.integers(1, 4097, 2))
        r, c, t = crossbars_for_layer(LayerSpec(f"l{i}", "conv", k, k, nif, nof, nif), hw)
        cells = -(-hw.weight_precision // hw.bits_per_cell)
        fan_in, cols = k * k * nif, nof * cells
        ok = ((r - 1) * hw.crossbar_rows < fan_in <= r * hw.crossbar_rows
              and (c - 1) * hw.crossbar_cols < cols <= c * hw.crossbar_cols and t == r * c)
        bad += not ok
    dt = time.perf_counter() - t0
    verdict(2, [(f"{bad} violations in 10000 layers", bad == 0), (f"{dt:.3f}s < 1s", dt < 1.0)],
            "crossbar ceiling bounds")


def test_criterion_03_budget(tmp_path, capsys):
    net = FIXTURES / "lenet5_mnist.csv"
    hw = replace(HardwareConfig(), chiplet_structure="homogeneous", chiplet_count=1)
    try:
        run_pipeline(net, hw)
        raised = False
    except ChipletBudgetExceeded:
        raised = True
    cfg = tmp_path / "h.cfg"
    cfg.write_text("[chiplet]\nchiplet_structure = homogeneous\nchiplet_count = 1\n")
    out = tmp_path / "report.json"
    code = cli_main(["run", "--network", str(net), "--config", str(cfg), "--out", str(out)])
    err = json.loads(capsys.readouterr().err or "{}")
    verdict(3, [("run_pipeline raises ChipletBudgetExceeded", raised),
                (f"CLI exit {code}, error {err.get('error')}", code == 2 and err.get("error") == "ChipletBudgetExceeded"),
                ("no report written", not out.exists())], "homogeneous chiplet budget")


def test_criterion_04_cost_numerics():
    n = chips_per_wafer(152.4, 296)
    y = yield_(0.012, 296)
    c = normalized_cost(296, 74, WAFER_6IN)
    rng = np.random.default_rng(4)
    worst = 0.0
    for a_ref, a_tgt in rng.uniform(1, 1200, size=(1000, 2)):
        got = normalized_cost(a_ref, a_tgt, WAFER_300MM)
        want = (chips_per_wafer_raw(300, a_ref) * yield_(0.012, a_ref)) / \
            (chips_per_wafer_raw(300, a_tgt) * yield_(0.012, a_tgt))
        worst = max(worst, abs(got - want) / abs(want))
    verdict(4, [(f"dies(152.4, 296) = {n}", n == 41), (f"yield(0.012, 296) = {y:.5f}", abs(y - 0.0287) <= 1e-4),
                (f"C_norm(296->74) = {c:.5f}", abs(c - 0.0141) <= 1e-3),
                (f"identity worst rel err {worst:.1e} < 1e-10", worst < 1e-10)], "cost numerics")


def test_criterion_05_cost_trend():
    areas = np.arange(100, 1201, 1.0)
    cost = np.array([cost_per_good_die(a, WAFER_300MM, floored=False) for a in areas])
    d1, d2 = np.diff(cost), np.diff(cost, 2)
    verdict(5, [(f"strictly increasing (min step {d1.min():.3g})", bool((d1 > 0).all())),
                (f"convex (min second difference {d2.min():.3g})", bool((d2 > 0).all()))],
            "per-good-die cost over 100-1200 mm^2")


def test_criterion_06_improvement_ordering():
    t0 = time.perf_counter()
    cfg = CONFIGS / "default_32nm_rram.cfg"
    small = run_pipeline(FIXTURES / "resnet110_cifar10.csv", cfg)["cost"]["improvement_percent"]
    large = run_pipeline(FIXTURES / "vgg19_cifar100.csv", cfg)["cost"]["improvement_percent"]
    dt = time.perf_counter() - t0
    verdict(6, [(f"ResNet-110 {small:.2f}% < 5%", small < 5.0), (f"VGG-19 {large:.2f}% > 40%", large > 40.0),
                (f"{dt:.1f}s < 60s", dt < 60.0)], "chiplet vs monolithic cost improvement")


def test_criterion_07_interconnect():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    zl_bad = cons_bad = oracle_bad = 0
    for _ in range(200):
        w, h = (int(v) for v in rng.integers(1, 9, 2))
        t_r, t_l, flits = int(rng.integers(1, 5)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        cfg = MeshConfig(w, h, router_pipeline=t_r, link_latency=t_l, packet_flits=flits)
        s, d = (int(v) for v in rng.integers(0, w * h, 2))
        hops = abs(s % w - d % w) + abs(s // w - d // w)
        st = simulate([(s, d, int(rng.integers(0, 50)))], cfg)
        zl_bad += st.latencies.tolist() != [(hops + 1) * (t_r + t_l) + flits - 1]
        cons_bad += st.packets_injected != st.packets_ejected
    for _ in range(100):
        w, h = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        depth, t_r, t_l, flits = (int(rng.integers(1, 4)), int(rng.integers(1, 3)),
                                  int(rng.integers(1, 3)), int(rng.integers(1, 4)))
        n = int(rng.integers(1, 51))
        trace = np.stack([rng.integers(0, w * h, n), rng.integers(0, w * h, n), rng.integers(0, 20, n)], axis=1)
        cfg = MeshConfig(w, h, buffer_depth=depth, router_pipeline=t_r, link_latency=t_l, packet_flits=flits)
        st = simulate(trace, cfg)
        oracle_bad += st.latencies.tolist() != contention_oracle(trace, w, h, depth, t_r, t_l, flits)
        cons_bad += not (st.packets_injected == st.packets_ejected == n)
    dt = time.perf_counter() - t0
    verdict(7, [(f"zero-load mismatches {zl_bad}/200", zl_bad == 0),
                (f"conservation violations {cons_bad}/300", cons_bad == 0),
                (f"oracle mismatches {oracle_bad}/100", oracle_bad == 0), (f"{dt:.1f}s < 60s", dt < 60.0)],
            "interconnect correctness")


def test_criterion_08_nop_noc_tradeoff():
    rows, dt = timed(sweep, FIXTURES / "resnet110_cifar10.csv", CONFIGS / "default_32nm_rram.cfg",
                     "tiles_per_chiplet", [4, 9, 16, 25, 36])
    ok_rows = all(r["status"] == "ok" for r in rows)
    nop = [r["nop_edp"] for r in rows]
    noc = [r["noc_edp"] for r in rows]
    verdict(8, [("all sweep points ran", ok_rows),
                ("NoP EDP non-increasing " + ",".join(f"{v:.2e}" for v in nop),
                 all(b <= a for a, b in zip(nop, nop[1:]))),
                ("NoC EDP non-decreasing " + ",".join(f"{v:.2e}" for v in noc),
                 all(b >= a for a, b in zip(noc, noc[1:]))),
                (f"{dt:.1f}s < 600s", dt < 600.0)], "NoP/NoC trade-off over tiles per chiplet")


def test_criterion_09_dram_chunking():
    hw = HardwareConfig()
    cfg = hw.dram
    t0 = time.perf_counter()
    size = 10_000 * cfg.burst_bytes
    full = estimate_chunked(size, 8, cfg, 1.0)
    half = estimate_chunked(size, 8, cfg, 0.5)
    dt = time.perf_counter() - t0
    err = abs(half.edp - full.edp) / full.edp
    verdict(9, [(f"{full.transactions} transactions", full.transactions == half.transactions == 10_000),
                (f"EDP error {err * 100:.3f}% < 2%", err < 0.02), (f"{dt:.2f}s < 10s", dt < 10.0)],
            "DRAM chunking")


def test_criterion_10_determinism():
    net, cfg = FIXTURES / "resnet110_cifar10.csv", CONFIGS / "default_32nm_rram.cfg"
    serial, dt = timed(run_pipeline, net, cfg, serial=True)
    concurrent = run_pipeline(net, cfg, serial=False)
    again = run_pipeline(net, cfg, serial=False)
    a, b, c = report_json(serial), report_json(concurrent), report_json(again)
    verdict(10, [("serial == concurrent bytes", a == b), ("two runs identical bytes", b == c),
                 (f"ResNet-110 pipeline {dt:.2f}s < 300s", dt < 300.0)], "engine independence and determinism")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
