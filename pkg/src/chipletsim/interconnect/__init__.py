from .mesh import BACKEND, MeshConfig, SimStats, area_energy, simulate
from .trace import pair_events, read_trace, write_trace
from .tree import simulate_tree

__all__ = ["BACKEND", "MeshConfig", "SimStats", "area_energy", "simulate", "simulate_tree",
           "pair_events", "read_trace", "write_trace"]
