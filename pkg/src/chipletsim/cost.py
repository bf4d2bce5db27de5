"""Fabrication cost: dies per wafer, Poisson yield, normalized die cost.

    N(A)  = D*pi*(D/(4A) - 1/sqrt(2A))        dies per wafer of diameter D
    eta   = exp(-D0*A)                        fraction of good dies
    C_norm(A_ref -> A) = (N_ref/N) * exp(-D0*(A_ref - A))

Areas are mm^2, diameters mm, D0 defects/mm^2. Die counts are floored for
reporting and left unfloored for algebraic checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .circuit import chiplet_area
from .errors import AreaTooLarge
from .noc import noc_area, noc_mesh_config
from .nop import nop_fixed_area


@dataclass(frozen=True)
class WaferSpec:
    diameter: float = 300.0
    defect_density: float = 0.012
    wafer_cost: Optional[float] = None   # None: cost in wafer units

    def __post_init__(self):
        if self.diameter <= 0 or self.defect_density < 0:
            raise ValueError("wafer diameter must be > 0 and defect density >= 0")


WAFER_300MM = WaferSpec(300.0, 0.012)
WAFER_6IN = WaferSpec(152.4, 0.012)
WAFER_PRESETS = {"300mm": WAFER_300MM, "152.4mm": WAFER_6IN}


def chips_per_wafer_raw(D: float, A: float) -> float:
    if A <= 0:
        raise ValueError("die area must be positive")
    n = D * math.pi * (D / (4 * A) - 1 / math.sqrt(2 * A))
    if n <= 0:
        raise AreaTooLarge(f"a {A:.4g} mm^2 die does not fit a {D:.4g} mm wafer", area=A, diameter=D)
    return n


def chips_per_wafer(D: float, A: float) -> int:
    n = math.floor(chips_per_wafer_raw(D, A))
    if n < 1:
        raise AreaTooLarge(f"less than one {A:.4g} mm^2 die fits a {D:.4g} mm wafer", area=A, diameter=D)
    return n


def yield_(D0: float, A: float) -> float:
    if A < 0 or D0 < 0:
        raise ValueError("area and defect density must be >= 0")
    return math.exp(-D0 * A)


def normalized_cost(A_ref: float, A_target: float, wafer: WaferSpec = WAFER_6IN, floored=False) -> float:
    """Cost of a target die relative to a reference die from the same wafer."""
    count = chips_per_wafer if floored else chips_per_wafer_raw
    n_ref = count(wafer.diameter, A_ref)
    n_tgt = count(wafer.diameter, A_target)
    return (n_ref / n_tgt) * math.exp(-wafer.defect_density * (A_ref - A_target))


def cost_per_good_die(A: float, wafer: WaferSpec = WAFER_300MM, floored=True) -> float:
    """Wafer cost divided by good dies per wafer (wafer units unless wafer_cost is set)."""
    count = chips_per_wafer if floored else chips_per_wafer_raw
    per_wafer = 1.0 if wafer.wafer_cost is None else wafer.wafer_cost
    return per_wafer / (yield_(wafer.defect_density, A) * count(wafer.diameter, A))


@dataclass(frozen=True)
class CostComparison:
    chiplet_area: float      # mm^2 per chiplet die
    chiplet_count: int
    monolithic_area: float   # mm^2
    chiplet_cost: float
    monolithic_cost: float
    improvement_percent: float

    def as_dict(self):
        return dict(self.__dict__)


def compare_costs(chiplet_area: float, count: int, monolithic_area: float,
                  wafer: WaferSpec = WAFER_300MM, packaging_fraction: float = 0.1) -> CostComparison:
    dies = count * cost_per_good_die(chiplet_area, wafer)
    chiplet = dies * (1.0 + packaging_fraction)
    mono = cost_per_good_die(monolithic_area, wafer)
    return CostComparison(chiplet_area, count, monolithic_area, chiplet, mono, (mono - chiplet) / mono * 100.0)


def die_areas(mapping, hw, lib=None):
    """(chiplet die mm^2, monolithic die mm^2, chiplet count) for a mapped architecture.

    A chiplet die holds its tiles, pooling/activation, its NoC and the on-die
    NoP parts (TX/RX, clocking, router). The monolithic die holds the same
    circuits and NoCs for every chiplet on one die, without NoP parts.
    """
    lib = lib if lib is not None else hw.components
    noc = noc_mesh_config(mapping.tiles_per_chiplet, hw, lib)
    core = chiplet_area(hw, lib, mapping.tiles_per_chiplet) + noc_area(noc, hw.noc.topology)
    count = mapping.available_chiplets
    if mapping.mode == "monolithic":
        return core * 1e-6, core * 1e-6, 1
    chiplet = core + nop_fixed_area(hw, lib)
    return chiplet * 1e-6, count * core * 1e-6, count


def architecture_cost(mapping, hw, wafer: WaferSpec = None, lib=None) -> CostComparison:
    wafer = wafer or WaferSpec(hw.wafer_diameter_mm, hw.defect_density)
    a_chip, a_mono, count = die_areas(mapping, hw, lib)
    packaging = 0.0 if mapping.mode == "monolithic" else hw.packaging_cost_fraction
    return compare_costs(a_chip, count, a_mono, wafer, packaging)
