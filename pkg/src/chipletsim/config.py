"""Network descriptor and hardware configuration ingest.

Two file formats are handled here:

* the network descriptor, a CSV with one row per layer in execution order
  (header ``name,kind,kx,ky,nif,nof,activations,sparsity`` plus the optional
  columns ``input_from``, ``has_pool`` and ``pool_kind``);
* the hardware configuration, an INI-style key/value file with the sections
  ``[general] [chiplet] [noc] [nop] [dram] [components]``.

Every key of the configuration is optional except ``chiplet_count`` for a
homogeneous architecture; omitted keys take the defaults in :data:`CONFIG_KEYS`.
Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .errors import (
    EmptyNetwork,
    InconsistentMode,
    InvalidValue,
    MalformedRow,
    MissingComponent,
    MissingRequiredKey,
    UnknownKey,
)

# ---------------------------------------------------------------------------
# network descriptor
# ---------------------------------------------------------------------------

LAYER_KINDS = ("conv", "fc")
POOL_KINDS = ("max", "avg")
REQUIRED_COLUMNS = ("name", "kind", "kx", "ky", "nif", "nof", "activations", "sparsity")
OPTIONAL_COLUMNS = ("input_from", "has_pool", "pool_kind")


@dataclass(frozen=True)
class LayerSpec:
    """Shape of one DNN layer.

    ``input_activations`` is the number of activations the layer consumes per
    inference. ``input_from`` lists earlier layers that feed this one over a
    branch (residual/dense) connection in addition to the preceding row.
    """

    name: str
    kind: str
    kernel_x: int
    kernel_y: int
    in_features: int
    out_features: int
    input_activations: int
    sparsity: float = 0.0
    input_from: tuple = ()
    has_pool: bool = False
    pool_kind: Optional[str] = None

    @property
    def weights(self) -> int:
        return self.kernel_x * self.kernel_y * self.in_features * self.out_features

    @property
    def input_vectors(self) -> float:
        # spatial positions presented to the crossbars (stride-1 view)
        return self.input_activations / self.in_features

    @property
    def computed_outputs(self) -> float:
        return self.input_vectors * self.out_features


def validate_layer(layer: LayerSpec, line=None):
    where = {} if line is None else {"line": line}
    if layer.kind not in LAYER_KINDS:
        raise InvalidValue(f"layer {layer.name!r}: unknown kind {layer.kind!r}", column="kind", **where)
    for col, attr in (("kx", "kernel_x"), ("ky", "kernel_y"), ("nif", "in_features"),
                      ("nof", "out_features"), ("activations", "input_activations")):
        value = getattr(layer, attr)
        if value < 1:
            raise InvalidValue(f"layer {layer.name!r}: {col} must be >= 1, got {value}", column=col, **where)
    if layer.kind == "fc" and (layer.kernel_x != 1 or layer.kernel_y != 1):
        raise InvalidValue(f"layer {layer.name!r}: fc layers need kx = ky = 1", column="kx", **where)
    if not (0.0 <= layer.sparsity < 1.0):
        raise InvalidValue(f"layer {layer.name!r}: sparsity {layer.sparsity} outside [0, 1)",
                           column="sparsity", **where)
    if layer.pool_kind is not None and layer.pool_kind not in POOL_KINDS:
        raise InvalidValue(f"layer {layer.name!r}: unknown pool_kind {layer.pool_kind!r}",
                           column="pool_kind", **where)


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(text)


def parse_network_text(text: str) -> list:
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text)))]
    rows = [(n, r) for n, r in rows if r and any(c.strip() for c in r) and not r[0].lstrip().startswith("#")]
    if not rows:
        raise EmptyNetwork("network descriptor is empty")
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    for col in header:
        if col not in REQUIRED_COLUMNS and col not in OPTIONAL_COLUMNS:
            raise MalformedRow(f"unknown column {col!r}", header_line, col)
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MalformedRow(f"missing column {col!r}", header_line, col)
    if len(rows) == 1:
        raise EmptyNetwork("network descriptor has a header but no layers")

    layers = []
    seen = {}
    for line, raw in rows[1:]:
        if len(raw) != len(header):
            raise MalformedRow(f"expected {len(header)} fields, got {len(raw)}", line)
        rec = {h: v.strip() for h, v in zip(header, raw)}
        ints = {}
        for col in ("kx", "ky", "nif", "nof", "activations"):
            try:
                ints[col] = int(rec[col])
            except ValueError:
                raise MalformedRow(f"{col} is not an integer: {rec[col]!r}", line, col) from None
        try:
            sparsity = float(rec["sparsity"])
        except ValueError:
            raise MalformedRow(f"sparsity is not a number: {rec['sparsity']!r}", line, "sparsity") from None
        try:
            has_pool = _parse_bool(rec.get("has_pool", ""))
        except ValueError:
            raise MalformedRow(f"has_pool is not a boolean: {rec['has_pool']!r}", line, "has_pool") from None
        sources = tuple(s.strip() for s in rec.get("input_from", "").split(";") if s.strip())
        pool_kind = rec.get("pool_kind", "") or None
        if has_pool and pool_kind is None:
            pool_kind = "max"
        layer = LayerSpec(
            name=rec["name"], kind=rec["kind"].lower(),
            kernel_x=ints["kx"], kernel_y=ints["ky"],
            in_features=ints["nif"], out_features=ints["nof"],
            input_activations=ints["activations"], sparsity=sparsity,
            input_from=sources, has_pool=has_pool, pool_kind=pool_kind,
        )
        if not layer.name:
            raise InvalidValue("empty layer name", line=line, column="name")
        if layer.name in seen:
            raise InvalidValue(f"duplicate layer name {layer.name!r}", line=line, column="name")
        validate_layer(layer, line)
        for src in sources:
            if src not in seen:
                raise InvalidValue(f"input_from {src!r} does not name an earlier layer",
                                   line=line, column="input_from")
        seen[layer.name] = len(layers)
        layers.append(layer)
    return layers


def parse_network(path) -> list:
    """Read a network descriptor file and return its layers in file order."""
    return parse_network_text(Path(path).read_text())


def serialize_network(layers) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(REQUIRED_COLUMNS + OPTIONAL_COLUMNS)
    for l in layers:
        w.writerow([l.name, l.kind, l.kernel_x, l.kernel_y, l.in_features, l.out_features,
                    l.input_activations, repr(float(l.sparsity)), ";".join(l.input_from),
                    int(l.has_pool), l.pool_kind or ""])
    return out.getvalue()


# ---------------------------------------------------------------------------
# hardware configuration
# ---------------------------------------------------------------------------

COMPONENT_NAMES = (
    "crossbar_cell_array", "adc", "column_mux", "shift_add", "tile_buffer",
    "tile_accumulator", "pooling_unit", "activation_unit",
    "global_accumulator_per_add", "global_buffer_per_access",
    "noc_router", "noc_link_per_mm", "nop_router",
)
COMPONENT_FIELDS = ("area", "energy", "latency", "leakage")


@dataclass(frozen=True)
class ComponentCost:
    """Area (um^2), energy per operation (pJ), latency per operation (ns), leakage (uW)."""

    area: float
    energy: float
    latency: float
    leakage: float


# Illustrative, order-of-magnitude constants for a 32 nm RRAM design. They
# are placeholders for a calibrated library, not measured values.
DEFAULT_COMPONENTS = {
    "crossbar_cell_array": ComponentCost(area=300.0, energy=1.2, latency=1.0, leakage=0.0),
    "adc": ComponentCost(area=120.0, energy=0.25, latency=1.0, leakage=0.01),
    "column_mux": ComponentCost(area=60.0, energy=0.005, latency=0.0, leakage=0.0),
    "shift_add": ComponentCost(area=300.0, energy=0.03, latency=1.0, leakage=0.05),
    "tile_buffer": ComponentCost(area=12000.0, energy=0.4, latency=1.0, leakage=5.0),
    "tile_accumulator": ComponentCost(area=2000.0, energy=0.05, latency=1.0, leakage=1.0),
    "pooling_unit": ComponentCost(area=1500.0, energy=0.02, latency=1.0, leakage=0.5),
    "activation_unit": ComponentCost(area=800.0, energy=0.01, latency=1.0, leakage=0.3),
    "global_accumulator_per_add": ComponentCost(area=40000.0, energy=0.1, latency=1.0, leakage=10.0),
    "global_buffer_per_access": ComponentCost(area=150000.0, energy=1.0, latency=1.0, leakage=50.0),
    "noc_router": ComponentCost(area=6000.0, energy=0.9, latency=1.0, leakage=2.0),
    "noc_link_per_mm": ComponentCost(area=3200.0, energy=0.08, latency=0.0, leakage=0.0),
    "nop_router": ComponentCost(area=15000.0, energy=1.2, latency=1.0, leakage=6.0),
}


@dataclass(frozen=True)
class ComponentCostLibrary:
    entries: dict = field(default_factory=lambda: dict(DEFAULT_COMPONENTS))

    def __getitem__(self, name) -> ComponentCost:
        try:
            return self.entries[name]
        except KeyError:
            raise MissingComponent(f"component library has no entry for {name!r}", component=name) from None

    def __contains__(self, name):
        return name in self.entries

    def check(self):
        for name in COMPONENT_NAMES:
            self[name]


@dataclass(frozen=True)
class NocConfig:
    topology: str = "mesh"
    flit_width: int = 32
    buffer_depth: int = 8
    router_pipeline: int = 2
    link_latency: int = 1
    packet_flits: int = 1
    node_pitch_mm: float = 0.25
    frequency: Optional[float] = None  # None: run at the general clock
    watchdog_cycles: int = 100000


@dataclass(frozen=True)
class WireParams:
    length_mm: float = 2.0
    resistance_per_mm: float = 50.0   # ohm / mm
    capacitance_per_mm: float = 200.0  # fF / mm
    pitch_um: float = 5.6
    width_um: float = 2.0


@dataclass(frozen=True)
class NopConfig:
    frequency: float = 250e6
    channel_width: int = 32
    energy_per_bit: float = 0.54
    txrx_area: float = 5304.0
    clocking_area: float = 10609.0
    wire: WireParams = WireParams()
    shielding_tracks: int = 2
    buffer_depth: int = 8
    router_pipeline: int = 2
    link_latency: int = 1
    wire_energy_per_bit_per_mm: float = 0.0
    energy_mode: str = "activation_bits"


DRAM_PRESETS = {
    # clock in MHz, timings in clock cycles, energies in pJ, background in mW
    "DDR4": dict(clock_mhz=1200.0, burst_bytes=64, burst_cycles=4, tRCD=16, tCAS=16, tRP=16, tRAS=39,
                 row_bytes=8192, activate_energy=1800.0, read_energy=4000.0, precharge_energy=1000.0,
                 background_power_mw=100.0),
    "DDR3": dict(clock_mhz=800.0, burst_bytes=64, burst_cycles=4, tRCD=11, tCAS=11, tRP=11, tRAS=28,
                 row_bytes=8192, activate_energy=2500.0, read_energy=5200.0, precharge_energy=1400.0,
                 background_power_mw=120.0),
}


@dataclass(frozen=True)
class DramConfig:
    standard: str = "DDR4"
    clock_mhz: float = 1200.0
    burst_bytes: int = 64
    burst_cycles: int = 4
    tRCD: int = 16
    tCAS: int = 16
    tRP: int = 16
    tRAS: int = 39
    row_bytes: int = 8192
    activate_energy: float = 1800.0
    read_energy: float = 4000.0
    precharge_energy: float = 1000.0
    background_power_mw: float = 100.0
    chunk_fraction: float = 1.0
    include_in_totals: bool = False


@dataclass(frozen=True)
class HardwareConfig:
    # general
    weight_precision: int = 8
    activation_precision: int = 8
    cell_type: str = "RRAM"
    bits_per_cell: int = 1
    crossbar_rows: int = 128
    crossbar_cols: int = 128
    crossbars_per_tile: int = 16
    adc_resolution: int = 4
    columns_per_adc: int = 8
    clock_frequency: float = 1e9
    readout_mode: str = "parallel"
    tech_node_nm: int = 32
    buffer_type: str = "SRAM"
    overlap_nop_compute: bool = False
    # chiplet
    chip_mode: str = "chiplet"
    chiplet_structure: str = "custom"
    chiplet_count: Optional[int] = None
    tiles_per_chiplet: int = 16
    global_accumulator_width: int = 16
    pack_layers: bool = True
    wafer_diameter_mm: float = 300.0
    defect_density: float = 0.012
    packaging_cost_fraction: float = 0.1
    # subsystems
    noc: NocConfig = NocConfig()
    nop: NopConfig = NopConfig()
    dram: DramConfig = DramConfig()
    components: ComponentCostLibrary = field(default_factory=ComponentCostLibrary)

    @property
    def chiplet_size(self) -> int:
        """Crossbars per chiplet (S)."""
        return self.tiles_per_chiplet * self.crossbars_per_tile

    @property
    def noc_frequency(self) -> float:
        return self.noc.frequency if self.noc.frequency is not None else self.clock_frequency


# (section, key) -> (target, attribute, type). Target "hw" is HardwareConfig
# itself; "noc"/"nop"/"wire"/"dram" are the nested records.
_INT, _FLOAT, _STR, _BOOL, _OPT_INT, _OPT_FLOAT = "int", "float", "str", "bool", "opt_int", "opt_float"

CONFIG_KEYS = {
    "general": {
        "weight_precision": ("hw", _INT), "activation_precision": ("hw", _INT),
        "cell_type": ("hw", _STR), "bits_per_cell": ("hw", _INT),
        "crossbar_rows": ("hw", _INT), "crossbar_cols": ("hw", _INT),
        "crossbars_per_tile": ("hw", _INT), "adc_resolution": ("hw", _INT),
        "columns_per_adc": ("hw", _INT), "clock_frequency": ("hw", _FLOAT),
        "readout_mode": ("hw", _STR), "tech_node_nm": ("hw", _INT),
        "buffer_type": ("hw", _STR), "overlap_nop_compute": ("hw", _BOOL),
    },
    "chiplet": {
        "chip_mode": ("hw", _STR), "chiplet_structure": ("hw", _STR),
        "chiplet_count": ("hw", _OPT_INT), "tiles_per_chiplet": ("hw", _INT),
        "global_accumulator_width": ("hw", _INT), "pack_layers": ("hw", _BOOL),
        "wafer_diameter_mm": ("hw", _FLOAT), "defect_density": ("hw", _FLOAT),
        "packaging_cost_fraction": ("hw", _FLOAT),
    },
    "noc": {
        "topology": ("noc", _STR), "flit_width": ("noc", _INT), "buffer_depth": ("noc", _INT),
        "router_pipeline": ("noc", _INT), "link_latency": ("noc", _INT),
        "packet_flits": ("noc", _INT), "node_pitch_mm": ("noc", _FLOAT),
        "frequency": ("noc", _OPT_FLOAT), "watchdog_cycles": ("noc", _INT),
    },
    "nop": {
        "frequency": ("nop", _FLOAT), "channel_width": ("nop", _INT),
        "energy_per_bit": ("nop", _FLOAT), "txrx_area": ("nop", _FLOAT),
        "clocking_area": ("nop", _FLOAT), "shielding_tracks": ("nop", _INT),
        "buffer_depth": ("nop", _INT), "router_pipeline": ("nop", _INT),
        "link_latency": ("nop", _INT), "wire_energy_per_bit_per_mm": ("nop", _FLOAT),
        "energy_mode": ("nop", _STR),
        "wire_length_mm": ("wire", _FLOAT), "wire_resistance_per_mm": ("wire", _FLOAT),
        "wire_capacitance_per_mm": ("wire", _FLOAT), "wire_pitch_um": ("wire", _FLOAT),
        "wire_width_um": ("wire", _FLOAT),
    },
    "dram": {
        "standard": ("dram", _STR), "clock_mhz": ("dram", _FLOAT), "burst_bytes": ("dram", _INT),
        "burst_cycles": ("dram", _INT), "tRCD": ("dram", _INT), "tCAS": ("dram", _INT),
        "tRP": ("dram", _INT), "tRAS": ("dram", _INT), "row_bytes": ("dram", _INT),
        "activate_energy": ("dram", _FLOAT), "read_energy": ("dram", _FLOAT),
        "precharge_energy": ("dram", _FLOAT), "background_power_mw": ("dram", _FLOAT),
        "chunk_fraction": ("dram", _FLOAT), "include_in_totals": ("dram", _BOOL),
    },
}

_ENUMS = {
    "cell_type": ("RRAM", "SRAM"),
    "readout_mode": ("sequential", "parallel"),
    "buffer_type": ("SRAM", "RegisterFile"),
    "chip_mode": ("monolithic", "chiplet"),
    "chiplet_structure": ("homogeneous", "custom"),
    "topology": ("mesh", "tree"),
    "energy_mode": ("activation_bits", "bus_bits"),
    "standard": ("DDR3", "DDR4"),
}


def _attr_name(target, key):
    return key[len("wire_"):] if target == "wire" else key


def _convert(kind, raw, section, key):
    text = raw.strip()
    try:
        if kind == _INT:
            return int(text)
        if kind == _FLOAT:
            return float(text)
        if kind == _BOOL:
            return _parse_bool(text)
        if kind == _OPT_INT:
            return None if text.lower() in ("", "none") else int(text)
        if kind == _OPT_FLOAT:
            return None if text.lower() in ("", "none") else float(text)
        return text
    except ValueError:
        raise InvalidValue(f"[{section}] {key}: cannot parse {raw!r} as {kind}", section=section, key=key) from None


def _check_enum(attr, value, section):
    allowed = _ENUMS.get(attr)
    if allowed is not None and value not in allowed:
        raise InvalidValue(f"[{section}] {attr}: {value!r} not one of {allowed}", section=section, key=attr)


def validate_config(hw: HardwareConfig):
    for attr in ("weight_precision", "activation_precision", "bits_per_cell", "crossbar_rows",
                 "crossbar_cols", "crossbars_per_tile", "adc_resolution", "columns_per_adc",
                 "tiles_per_chiplet", "global_accumulator_width"):
        if getattr(hw, attr) < 1:
            raise InvalidValue(f"{attr} must be >= 1", key=attr)
    if hw.clock_frequency <= 0:
        raise InvalidValue("clock_frequency must be positive", key="clock_frequency")
    if hw.crossbar_cols % hw.columns_per_adc:
        raise InvalidValue("crossbar_cols must be a multiple of columns_per_adc", key="columns_per_adc")
    if hw.wafer_diameter_mm <= 0 or hw.defect_density < 0 or hw.packaging_cost_fraction < 0:
        raise InvalidValue("wafer parameters out of range", key="wafer_diameter_mm")
    if hw.chip_mode == "monolithic":
        if hw.chiplet_structure != "custom" or hw.chiplet_count is not None:
            raise InconsistentMode("monolithic chip_mode takes no chiplet_count / homogeneous structure")
    elif hw.chiplet_structure == "homogeneous":
        if hw.chiplet_count is None:
            raise MissingRequiredKey("chiplet_count is required for a homogeneous architecture",
                                     section="chiplet", key="chiplet_count")
        if hw.chiplet_count < 1:
            raise InvalidValue("chiplet_count must be >= 1", key="chiplet_count")
    elif hw.chiplet_count is not None:
        raise InconsistentMode("chiplet_count is only valid with chiplet_structure = homogeneous",
                               section="chiplet", key="chiplet_count")
    noc = hw.noc
    for attr in ("flit_width", "buffer_depth", "router_pipeline", "link_latency", "packet_flits",
                 "watchdog_cycles"):
        if getattr(noc, attr) < 1:
            raise InvalidValue(f"[noc] {attr} must be >= 1", key=attr)
    if noc.node_pitch_mm <= 0 or (noc.frequency is not None and noc.frequency <= 0):
        raise InvalidValue("[noc] pitch and frequency must be positive", key="node_pitch_mm")
    nop = hw.nop
    for attr in ("frequency", "channel_width", "energy_per_bit", "txrx_area", "clocking_area",
                 "shielding_tracks", "buffer_depth", "router_pipeline", "link_latency"):
        if getattr(nop, attr) <= 0:
            raise InvalidValue(f"[nop] {attr} must be positive", key=attr)
    for f in fields(WireParams):
        if getattr(nop.wire, f.name) <= 0:
            raise InvalidValue(f"[nop] wire_{f.name} must be positive", key="wire_" + f.name)
    if nop.wire_energy_per_bit_per_mm < 0:
        raise InvalidValue("[nop] wire_energy_per_bit_per_mm must be >= 0", key="wire_energy_per_bit_per_mm")
    d = hw.dram
    for attr in ("clock_mhz", "burst_bytes", "burst_cycles", "tRCD", "tCAS", "tRP", "tRAS", "row_bytes"):
        if getattr(d, attr) <= 0:
            raise InvalidValue(f"[dram] {attr} must be positive", key=attr)
    if d.row_bytes % d.burst_bytes:
        raise InvalidValue("[dram] row_bytes must be a multiple of burst_bytes", key="row_bytes")
    for attr in ("activate_energy", "read_energy", "precharge_energy", "background_power_mw"):
        if getattr(d, attr) < 0:
            raise InvalidValue(f"[dram] {attr} must be >= 0", key=attr)
    if not (0.0 < d.chunk_fraction <= 1.0):
        raise InvalidValue("[dram] chunk_fraction must be in (0, 1]", key="chunk_fraction")
    for name, cost in hw.components.entries.items():
        for f in COMPONENT_FIELDS:
            v = getattr(cost, f)
            if not (v >= 0 and math.isfinite(v)):
                raise InvalidValue(f"[components] {name}.{f} must be >= 0", key=f"{name}.{f}")
    hw.components.check()


def parse_config_text(text: str) -> HardwareConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__unused_default__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidValue(f"cannot parse configuration: {exc}") from None

    values = {"hw": {}, "noc": {}, "nop": {}, "wire": {}, "dram": {}}
    components = {k: dict(vars(v)) for k, v in DEFAULT_COMPONENTS.items()}
    for section in cp.sections():
        if section == "components":
            for key, raw in cp.items(section):
                name, _, attr = key.rpartition(".")
                if name not in COMPONENT_NAMES or attr not in COMPONENT_FIELDS:
                    raise UnknownKey(f"[components] unknown key {key!r}", section=section, key=key)
                components[name][attr] = _convert(_FLOAT, raw, section, key)
            continue
        table = CONFIG_KEYS.get(section)
        if table is None:
            raise UnknownKey(f"unknown section [{section}]", section=section)
        for key, raw in cp.items(section):
            if key not in table:
                raise UnknownKey(f"[{section}] unknown key {key!r}", section=section, key=key)
            target, kind = table[key]
            attr = _attr_name(target, key)
            value = _convert(kind, raw, section, key)
            _check_enum(attr, value, section)
            values[target][attr] = value

    dram_kwargs = dict(DRAM_PRESETS[values["dram"].get("standard", "DDR4")])
    dram_kwargs.update(values["dram"])
    nop = NopConfig(wire=WireParams(**values["wire"]), **values["nop"])
    hw = HardwareConfig(
        noc=NocConfig(**values["noc"]), nop=nop, dram=DramConfig(**dram_kwargs),
        components=ComponentCostLibrary({k: ComponentCost(**v) for k, v in components.items()}),
        **values["hw"],
    )
    validate_config(hw)
    return hw


def parse_config(path) -> HardwareConfig:
    """Read a configuration file, apply defaults for omitted keys and validate."""
    return parse_config_text(Path(path).read_text())


def _fmt(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(hw: HardwareConfig) -> str:
    """Render a configuration with every key spelled out; parses back to an equal object."""
    lines = []
    sources = {"hw": hw, "noc": hw.noc, "nop": hw.nop, "wire": hw.nop.wire, "dram": hw.dram}
    for section, table in CONFIG_KEYS.items():
        lines.append(f"[{section}]")
        for key, (target, _) in table.items():
            if key == "chiplet_count" and hw.chiplet_count is None:
                continue
            value = getattr(sources[target], _attr_name(target, key))
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    lines.append("[components]")
    for name in sorted(hw.components.entries):
        cost = hw.components.entries[name]
        for attr in COMPONENT_FIELDS:
            lines.append(f"{name}.{attr} = {_fmt(float(getattr(cost, attr)))}")
    lines.append("")
    return "\n".join(lines)


def config_to_dict(hw: HardwareConfig) -> dict:
    out = {}
    for f in fields(HardwareConfig):
        v = getattr(hw, f.name)
        if f.name == "components":
            out[f.name] = {k: vars(c) for k, c in sorted(v.entries.items())}
        elif f.name in ("noc", "dram"):
            out[f.name] = dict(vars(v))
        elif f.name == "nop":
            d = dict(vars(v))
            d["wire"] = dict(vars(v.wire))
            out[f.name] = d
        else:
            out[f.name] = v
    return out


def with_overrides(hw: HardwareConfig, **changes) -> HardwareConfig:
    """``dataclasses.replace`` followed by validation."""
    new = replace(hw, **changes)
    validate_config(new)
    return new
