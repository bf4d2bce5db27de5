from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from chipletsim.circuit import (PerfTriple, adcs_per_crossbar, estimate_circuit, estimate_crossbar_unit,
                                estimate_global, estimate_layer_circuit, global_layer_cost)
from chipletsim.config import ComponentCost, ComponentCostLibrary, DEFAULT_COMPONENTS, HardwareConfig, LayerSpec
from chipletsim.errors import MissingComponent
from chipletsim.mapping import partition_network
from chipletsim.oracles import derived_cases

HW = HardwareConfig()
LIB = HW.components
CASES = derived_cases()


def lib_with(**changes):
    entries = dict(DEFAULT_COMPONENTS)
    for name, kw in changes.items():
        entries[name] = replace(entries[name], **kw)
    return ComponentCostLibrary(entries)


def test_parallel_readout_adc_count_and_conversions():
    assert adcs_per_crossbar(HW) == CASES["adc_instances"].expected == 16
    # isolate the ADC: everything else free
    zero = {n: {"area": 0.0, "energy": 0.0, "latency": 0.0} for n in ("crossbar_cell_array", "column_mux", "shift_add")}
    lib = lib_with(adc={"area": 1.0, "latency": 1.0}, **zero)
    unit = estimate_crossbar_unit(HW, lib)
    assert unit.area == 16.0
    assert unit.latency == CASES["adc_serial_conversions"].expected == 8.0


def test_no_column_mux_means_one_conversion():
    hw = replace(HW, columns_per_adc=1)
    zero = {n: {"latency": 0.0} for n in ("crossbar_cell_array", "shift_add")}
    lib = lib_with(adc={"latency": 1.0}, **zero)
    assert estimate_crossbar_unit(hw, lib).latency == 1.0


def test_sequential_readout_is_row_count_times_single_row():
    par = estimate_crossbar_unit(HW, LIB)
    seq = estimate_crossbar_unit(replace(HW, readout_mode="sequential"), LIB)
    assert seq.latency == CASES["sequential_latency_factor"].expected * par.latency
    assert seq.area == par.area


def layer20():
    return LayerSpec("a", "conv", 3, 3, 64, 64, 64, 0.0)   # 20 crossbars, one input vector


def test_parallel_crossbars_share_latency():
    hw = replace(HW, activation_precision=1)
    lm = partition_network([layer20()], hw).per_layer[0]
    assert lm.total_crossbars == 20
    unit = estimate_crossbar_unit(hw, LIB)
    xb = estimate_layer_circuit(lm, layer20(), hw, LIB).crossbar
    assert xb.energy == pytest.approx(CASES["parallel_layer_energy_units"].expected * unit.energy, rel=1e-12)
    assert xb.latency == unit.latency


def test_sparsity_halves_dynamic_energy():
    dense, sparse = layer20(), replace(layer20(), sparsity=0.5)
    lm = partition_network([dense], HW).per_layer[0]
    a = estimate_layer_circuit(lm, dense, HW, LIB).total
    b = estimate_layer_circuit(lm, sparse, HW, LIB).total
    assert b.energy == pytest.approx(a.energy / 2, rel=1e-12)
    assert b.area == a.area and b.latency == a.latency


def test_zero_activation_layer_is_static_only():
    layer = replace(layer20(), input_activations=0)
    lm = partition_network([layer20()], HW).per_layer[0]
    t = estimate_layer_circuit(lm, layer, HW, LIB).total
    assert t.energy == 0 and t.area > 0


def test_global_accumulator_examples():
    lib = lib_with(global_accumulator_per_add={"energy": 0.1})
    acc, _ = global_layer_cost(1000, 0, HW, lib)
    assert acc.energy == pytest.approx(CASES["global_add_energy"].expected, abs=1e-12)
    assert acc.latency == CASES["global_add_latency_ns"].expected == 63.0
    assert global_layer_cost(0, 0, HW, lib) == (PerfTriple(), PerfTriple())


def test_single_chiplet_layers_have_no_global_cost():
    net = [LayerSpec("a", "fc", 1, 1, 128, 16, 128), LayerSpec("b", "fc", 1, 1, 16, 16, 16)]
    m = partition_network(net, HW)
    acc, buf, per = estimate_global(m, HW, LIB)
    assert all(p == PerfTriple() for p in per)
    assert acc.energy == buf.energy == 0


def test_missing_component_raises():
    entries = dict(DEFAULT_COMPONENTS)
    del entries["adc"]
    with pytest.raises(MissingComponent):
        estimate_crossbar_unit(HW, ComponentCostLibrary(entries))


def test_totals_are_sum_of_parts(fixture_net):
    net = fixture_net("resnet110_cifar10")
    m = partition_network(net, HW)
    r = estimate_circuit(m, net, HW)
    energy = latency = 0.0
    for lc, g in zip(r.per_layer, r.global_per_layer):
        energy += lc.total.energy + g.energy
        latency += lc.total.latency + g.latency
    assert r.totals.energy == energy and r.totals.latency == latency
    die = r.per_chiplet[0].area
    assert r.totals.area == m.available_chiplets * die + r.global_accumulator.area + r.global_buffer.area
    assert r.leakage_energy(1000.0) == pytest.approx(r.leakage_power, rel=1e-15)


def test_area_is_independent_of_activations(fixture_net):
    net = fixture_net("vgg19_cifar100")
    scaled = [replace(l, input_activations=l.input_activations * 3) for l in net]
    a = estimate_circuit(partition_network(net, HW), net, HW).totals.area
    b = estimate_circuit(partition_network(scaled, HW), scaled, HW).totals.area
    assert a == b


def test_energy_linear_in_activations(fixture_net):
    # the last layer sits on one chiplet, so every accumulated count scales with A
    net = fixture_net("resnet110_cifar10")
    m = partition_network(net, HW)
    assert m.per_layer[-1].chiplet_count == 1
    doubled = [replace(l, input_activations=l.input_activations * 2) for l in net]
    a = estimate_circuit(m, net, HW).totals.energy
    b = estimate_circuit(partition_network(doubled, HW), doubled, HW).totals.energy
    assert b == pytest.approx(2 * a, rel=1e-12)


@st.composite
def chains(draw, max_layers=6):
    # shape-consistent: each layer reads vec positions of the previous layer's features
    n = draw(st.integers(2, max_layers))
    nif = draw(st.integers(1, 512))
    net = []
    for i in range(n):
        k = draw(st.sampled_from([1, 3]))
        nof = draw(st.integers(1, 512))
        vec = draw(st.integers(1, 16))
        pool = draw(st.booleans())
        net.append(LayerSpec(f"l{i}", "conv", k, k, nif, nof, nif * vec, 0.0, (), pool, "max" if pool else None))
        nif = nof
    return net


@settings(max_examples=60, deadline=None)
@given(chains())
def test_adding_a_layer_never_decreases_totals(grown):
    net = grown[:-1]
    a = estimate_circuit(partition_network(net, HW), net, HW)
    b = estimate_circuit(partition_network(grown, HW), grown, HW)
    assert b.totals.area >= a.totals.area
    assert b.totals.energy >= a.totals.energy
    assert b.totals.latency >= a.totals.latency
    assert b.leakage_power >= a.leakage_power


def test_all_components_non_negative():
    for name, c in DEFAULT_COMPONENTS.items():
        assert isinstance(c, ComponentCost)
        assert min(c.area, c.energy, c.latency, c.leakage) >= 0, name
