"""Time the compiled mesh kernel against the pure-Python one on the same traces.

    python3 benchmarks/bench_mesh.py [--packets 20000] [--mesh 4] [--repeat 3]
"""
import argparse
import time

import numpy as np

from chipletsim.interconnect.mesh import BACKEND, MeshConfig, simulate


def random_trace(rng, nodes, packets, spread):
    src = rng.integers(0, nodes, packets)
    dst = (src + rng.integers(1, nodes, packets)) % nodes
    ts = np.sort(rng.integers(0, spread, packets))
    return np.stack([src, dst, ts], axis=1)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--packets", type=int, default=20000)
    ap.add_argument("--mesh", type=int, default=4, help="mesh side length")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if BACKEND != "compiled":
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
    cfg = MeshConfig(args.mesh, args.mesh)
    rng = np.random.default_rng(args.seed)
    print(f"{'load':>8} {'packets':>8} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for spread_per_packet in (4, 1, 0.25):
        trace = random_trace(rng, cfg.nodes, args.packets, max(1, int(args.packets * spread_per_packet)))
        t_py, s_py = best_of(lambda: simulate(trace, cfg, backend="python"), args.repeat)
        t_c, s_c = best_of(lambda: simulate(trace, cfg, backend="compiled"), args.repeat)
        assert np.array_equal(s_py.latencies, s_c.latencies) and s_py.total_latency == s_c.total_latency
        print(f"{1 / spread_per_packet:>8.2f} {args.packets:>8} {t_py:>10.3f} {t_c:>11.4f} {t_py / t_c:>7.0f}x")


if __name__ == "__main__":
    main()
