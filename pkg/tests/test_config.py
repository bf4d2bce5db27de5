import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from chipletsim.config import (COMPONENT_NAMES, ComponentCost, ComponentCostLibrary, HardwareConfig,
                               LayerSpec, parse_config, parse_config_text, parse_network,
                               parse_network_text, serialize_config, serialize_network)
from chipletsim.errors import (EmptyNetwork, InconsistentMode, InvalidValue, MalformedRow,
                               MissingComponent, MissingRequiredKey, UnknownKey)

from conftest import CONFIGS, FIXTURES

HEADER = "name,kind,kx,ky,nif,nof,activations,sparsity\n"


def test_conv_row():
    (l,) = parse_network_text(HEADER + "conv1,conv,3,3,64,64,1048576,0.0\n")
    assert (l.kind, l.kernel_x, l.kernel_y, l.in_features, l.out_features, l.input_activations) == \
        ("conv", 3, 3, 64, 64, 1048576)
    assert l.weights == 3 * 3 * 64 * 64


def test_fc_row():
    (l,) = parse_network_text(HEADER + "fc1,fc,1,1,512,10,512,0.0\n")
    assert l.kind == "fc" and l.in_features == 512 and l.out_features == 10


def test_zero_kernel_rejected():
    with pytest.raises(InvalidValue):
        parse_network_text(HEADER + "convX,conv,0,3,64,64,100,0.0\n")


@pytest.mark.parametrize("row, err", [
    ("fc1,fc,3,3,512,10,512,0.0", InvalidValue),       # fc with a kernel
    ("c,conv,3,3,64,64,100,1.0", InvalidValue),        # sparsity must be < 1
    ("c,conv,3,3,64,64,100,-0.1", InvalidValue),
    ("c,pool,3,3,64,64,100,0.0", InvalidValue),
    ("c,conv,3,3,64,64,0,0.0", InvalidValue),
    ("c,conv,3,x,64,64,100,0.0", MalformedRow),
    ("c,conv,3,3,64,64,100", MalformedRow),
])
def test_bad_rows(row, err):
    with pytest.raises(err):
        parse_network_text(HEADER + row + "\n")


def test_malformed_row_reports_line():
    text = HEADER + "a,conv,3,3,4,4,16,0.0\nb,conv,3,3,4,4,16,0.0,extra\n"
    with pytest.raises(MalformedRow) as info:
        parse_network_text(text)
    assert info.value.details["line"] == 3


def test_empty_network():
    with pytest.raises(EmptyNetwork):
        parse_network_text(HEADER)
    with pytest.raises(EmptyNetwork):
        parse_network_text("")


def test_unknown_column():
    with pytest.raises(MalformedRow):
        parse_network_text("name,kind,kx,ky,nif,nof,activations,sparsity,bogus\n")


def test_input_from_must_name_earlier_layer():
    head = HEADER.strip() + ",input_from\n"
    with pytest.raises(InvalidValue):
        parse_network_text(head + "a,conv,3,3,4,4,16,0.0,b\nb,conv,3,3,4,4,16,0.0,\n")
    net = parse_network_text(head + "a,conv,3,3,4,4,16,0.0,\nb,conv,3,3,4,4,16,0.0,\nc,conv,3,3,4,4,16,0.0,a\n")
    assert net[2].input_from == ("a",)


def test_network_round_trip_fixtures():
    for path in sorted(FIXTURES.glob("*.csv")):
        net = parse_network(path)
        assert parse_network_text(serialize_network(net)) == net


layer_st = st.builds(
    lambda name, conv, k, nif, nof, act, sp, pool: LayerSpec(
        name, "conv" if conv else "fc", k if conv else 1, k if conv else 1, nif, nof, act, sp,
        (), pool is not None, pool),
    st.text("abcxyz", min_size=1, max_size=6), st.booleans(), st.integers(1, 7),
    st.integers(1, 4096), st.integers(1, 4096), st.integers(1, 10 ** 7),
    st.floats(0, 0.99, allow_nan=False), st.sampled_from([None, "max", "avg"]))


@settings(max_examples=200, deadline=None)
@given(st.lists(layer_st, min_size=1, max_size=8, unique_by=lambda l: l.name))
def test_network_round_trip_property(net):
    assert parse_network_text(serialize_network(net)) == net


def test_defaults_from_empty_sections():
    hw = parse_config_text("[general]\n[chiplet]\n")
    assert (hw.crossbar_rows, hw.crossbar_cols) == (128, 128)
    assert hw.tiles_per_chiplet == 16 and hw.crossbars_per_tile == 16
    assert hw.adc_resolution == 4 and hw.columns_per_adc == 8
    assert hw.clock_frequency == 1e9
    assert hw.chiplet_size == 256


def test_nop_defaults():
    nop = parse_config_text("").nop
    assert nop.energy_per_bit == 0.54 and nop.channel_width == 32
    assert nop.txrx_area == 5304 and nop.clocking_area == 10609


def test_custom_with_count_is_inconsistent():
    with pytest.raises(InconsistentMode):
        parse_config_text("[chiplet]\nchiplet_structure = custom\nchiplet_count = 36\n")


def test_homogeneous_needs_count():
    with pytest.raises(MissingRequiredKey):
        parse_config_text("[chiplet]\nchiplet_structure = homogeneous\n")
    hw = parse_config_text("[chiplet]\nchiplet_structure = homogeneous\nchiplet_count = 36\n")
    assert hw.chiplet_count == 36


def test_monolithic_rejects_count():
    with pytest.raises(InconsistentMode):
        parse_config_text("[chiplet]\nchip_mode = monolithic\nchiplet_structure = homogeneous\nchiplet_count = 4\n")


@pytest.mark.parametrize("text", [
    "[general]\ncrossbar_row = 128\n",
    "[bogus]\n",
    "[components]\nadc.power = 1\n",
    "[components]\nflux_capacitor.area = 1\n",
])
def test_unknown_keys(text):
    with pytest.raises(UnknownKey):
        parse_config_text(text)


@pytest.mark.parametrize("text", [
    "[general]\ncrossbar_rows = 0\n",
    "[general]\nreadout_mode = diagonal\n",
    "[general]\ncrossbar_cols = 100\n",     # not a multiple of columns_per_adc
    "[components]\nadc.area = -1\n",
    "[dram]\nchunk_fraction = 0\n",
    "[general]\nclock_frequency = fast\n",
])
def test_invalid_values(text):
    with pytest.raises(InvalidValue):
        parse_config_text(text)


def test_dram_preset_then_overrides():
    hw = parse_config_text("[dram]\nstandard = DDR3\ntRCD = 12\n")
    assert hw.dram.clock_mhz == 800.0 and hw.dram.tRCD == 12 and hw.dram.tCAS == 11


def test_component_override():
    hw = parse_config_text("[components]\nadc.area = 42.5\n")
    assert hw.components["adc"].area == 42.5
    assert hw.components["adc"].energy == HardwareConfig().components["adc"].energy


def test_missing_component():
    lib = ComponentCostLibrary({"adc": ComponentCost(1, 1, 1, 0)})
    with pytest.raises(MissingComponent):
        lib["shift_add"]
    with pytest.raises(MissingComponent):
        lib.check()
    assert set(HardwareConfig().components.entries) == set(COMPONENT_NAMES)


def test_config_round_trip_shipped_files():
    for path in sorted(CONFIGS.glob("*.cfg")):
        hw = parse_config(path)
        assert parse_config_text(serialize_config(hw)) == hw


@settings(max_examples=100, deadline=None)
@given(tiles=st.integers(1, 64), cpt=st.integers(1, 32), rows=st.sampled_from([32, 64, 128, 256]),
       wbits=st.integers(1, 16), cell=st.integers(1, 4), f=st.floats(1e6, 5e9),
       pitch=st.floats(0.01, 5.0), d0=st.floats(0.0, 0.1), sparse=st.booleans())
def test_config_round_trip_property(tiles, cpt, rows, wbits, cell, f, pitch, d0, sparse):
    base = HardwareConfig()
    hw = replace(base, tiles_per_chiplet=tiles, crossbars_per_tile=cpt, crossbar_rows=rows,
                 weight_precision=wbits, bits_per_cell=cell, clock_frequency=f, defect_density=d0,
                 overlap_nop_compute=sparse, noc=replace(base.noc, node_pitch_mm=pitch))
    assert parse_config_text(serialize_config(hw)) == hw


def test_parse_is_pure():
    text = (CONFIGS / "default_32nm_rram.cfg").read_text()
    assert parse_config_text(text) == parse_config_text(text)
    assert serialize_config(parse_config_text(text)) == serialize_config(parse_config_text(text))
    assert not math.isnan(parse_config_text(text).nop.frequency)
