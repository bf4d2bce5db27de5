"""One-time DRAM weight load: a closed-row streaming DDR model.

Weights are read once, sequentially. Every row touched costs one activate
and one precharge; the bursts inside a row stream back to back after the
first column access:

    row cycles = max(tRCD + tCAS + bursts * tBL, tRAS) + tRP

Energy is activates, bursts and precharges times their per-op energy plus
background power over the whole transfer (mW * ns = pJ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DramConfig


@dataclass(frozen=True)
class DramRequests:
    bytes: int
    transactions: int
    addresses: range        # byte address of every burst, sequential


@dataclass(frozen=True)
class DramEstimate:
    transactions: int = 0
    latency: float = 0.0    # ns
    energy: float = 0.0     # pJ
    edp: float = 0.0        # pJ * ns
    chunk_fraction: float = 1.0

    def as_dict(self):
        return {"transactions": self.transactions, "latency_ns": self.latency, "energy_pj": self.energy,
                "edp": self.edp, "chunk_fraction": self.chunk_fraction}


def generate_requests(model_size: int, precision: int, cfg: DramConfig) -> DramRequests:
    if model_size < 0:
        raise ValueError("model_size must be >= 0")
    nbytes = math.ceil(model_size * precision / 8)
    n = math.ceil(nbytes / cfg.burst_bytes)
    return DramRequests(nbytes, n, range(0, n * cfg.burst_bytes, cfg.burst_bytes))


def _row_runs(addresses, row_bytes):
    """Bursts per consecutive run of addresses that stay in one row."""
    if isinstance(addresses, range) and addresses.step > 0:
        if len(addresses) == 0:
            return np.zeros(0, dtype=np.int64)
        first, last = addresses[0] // row_bytes, addresses[-1] // row_bytes
        rows = np.arange(first, last + 1, dtype=np.int64)
        lo = np.maximum(rows * row_bytes, addresses.start)
        hi = np.minimum((rows + 1) * row_bytes, addresses[-1] + 1)
        return (hi - lo + addresses.step - 1) // addresses.step
    a = np.asarray(list(addresses), dtype=np.int64)
    if a.size == 0:
        return np.zeros(0, dtype=np.int64)
    row = a // row_bytes
    starts = np.flatnonzero(np.concatenate(([True], row[1:] != row[:-1])))
    return np.diff(np.append(starts, a.size))


def estimate(trace, cfg: DramConfig) -> DramEstimate:
    """Latency/energy of streaming the bursts in ``trace`` (a DramRequests or address sequence)."""
    addresses = trace.addresses if isinstance(trace, DramRequests) else trace
    runs = _row_runs(addresses, cfg.row_bytes)
    n = int(runs.sum())
    if n == 0:
        return DramEstimate()
    cycles = np.maximum(cfg.tRCD + cfg.tCAS + runs * cfg.burst_cycles, cfg.tRAS) + cfg.tRP
    latency = float(cycles.sum()) * 1e3 / cfg.clock_mhz
    rows = len(runs)
    energy = (rows * cfg.activate_energy + n * cfg.read_energy + rows * cfg.precharge_energy
              + cfg.background_power_mw * latency)
    return DramEstimate(n, latency, energy, energy * latency)


def estimate_chunked(model_size: int, precision: int, cfg: DramConfig, chunk_fraction=None) -> DramEstimate:
    """Simulate only the first ``ceil(f * n)`` bursts and scale up by ``n / m``."""
    f = cfg.chunk_fraction if chunk_fraction is None else chunk_fraction
    if not (0.0 < f <= 1.0):
        raise ValueError("chunk_fraction must be in (0, 1]")
    req = generate_requests(model_size, precision, cfg)
    n = req.transactions
    if n == 0:
        return DramEstimate(chunk_fraction=f)
    m = math.ceil(f * n)
    part = estimate(req.addresses[:m], cfg)
    if m == n:
        return DramEstimate(n, part.latency, part.energy, part.edp, f)
    scale = n / m
    latency, energy = part.latency * scale, part.energy * scale
    return DramEstimate(n, latency, energy, energy * latency, f)


def model_size(net) -> int:
    return sum(l.weights for l in net)
