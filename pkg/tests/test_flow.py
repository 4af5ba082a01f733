import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from querypricing.flow import FlowError, FlowNetwork, max_flow, min_cut
from oracles import brute_min_cut, random_arcs

DIAMOND = FlowNetwork(4, 0, 3, [(0, 1, 10), (0, 2, 10), (1, 2, 1), (1, 3, 10), (2, 3, 10)])


def test_series_bottleneck():
    net = FlowNetwork(3, 0, 2, [(0, 1, 3), (1, 2, 2)])
    assert max_flow(net) == 2
    cut = min_cut(net)
    assert cut.value == 2
    assert cut.cut_arcs == {1}


def test_parallel_arcs_sum():
    net = FlowNetwork(2, 0, 1, [(0, 1, 3), (0, 1, 2)])
    assert max_flow(net) == 5
    assert min_cut(net).cut_arcs == {0, 1}


def test_diamond_matches_enumeration():
    assert brute_min_cut(4, 0, 3, DIAMOND.arcs) == 20
    assert max_flow(DIAMOND) == 20
    cut = min_cut(DIAMOND)
    assert cut.value == 20
    assert cut.cut_arcs == {0, 1}


def test_all_infinite_path_is_unbounded():
    net = FlowNetwork(3, 0, 2, [(0, 1, None), (1, 2, None), (0, 2, 4.0)])
    assert math.isinf(max_flow(net))
    assert math.isinf(min_cut(net).value)


def test_infinite_arcs_are_never_cut():
    net = FlowNetwork(4, 0, 3, [(0, 1, None), (1, 2, 5.0), (1, 3, 2.0), (2, 3, None)])
    cut = min_cut(net)
    assert cut.value == 7
    assert cut.cut_arcs == {1, 2}


def test_disconnected_has_zero_flow():
    net = FlowNetwork(3, 0, 2, [(0, 1, 4.0)])
    assert max_flow(net) == 0
    assert min_cut(net).cut_arcs == frozenset()


@pytest.mark.parametrize("net", [
    FlowNetwork(2, 0, 0, [(0, 1, 1.0)]),
    FlowNetwork(2, 0, 1, [(0, 5, 1.0)]),
    FlowNetwork(2, 0, 1, [(0, 1, -1.0)]),
])
def test_malformed_networks_raise(net):
    with pytest.raises(FlowError):
        max_flow(net)


def test_duality_against_partition_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        net = FlowNetwork(*random_arcs(rng))
        expected = brute_min_cut(net.node_count, net.source, net.sink, net.arcs)
        got = max_flow(net)
        cut = min_cut(net)
        if math.isinf(expected):
            assert math.isinf(got) and math.isinf(cut.value)
        else:
            assert got == pytest.approx(expected, abs=1e-6)
            assert cut.value == pytest.approx(expected, abs=1e-6)
            # the canonical cut really separates source from sink
            side = cut.source_side
            assert net.sink not in side
            crossing = {k for k, (u, v, _) in enumerate(net.arcs) if u in side and v not in side}
            assert crossing == cut.cut_arcs


caps = st.integers(min_value=0, max_value=10)
arc_lists = st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), caps), max_size=12)


@settings(max_examples=200, deadline=None)
@given(arc_lists, st.floats(min_value=0.1, max_value=50))
def test_scaling_capacities(arcs, lam):
    net = FlowNetwork(6, 0, 5, arcs)
    scaled = FlowNetwork(6, 0, 5, [(u, v, c * lam) for u, v, c in arcs])
    assert max_flow(scaled) == pytest.approx(lam * max_flow(net), rel=1e-9, abs=1e-9)
    assert min_cut(scaled).cut_arcs == min_cut(net).cut_arcs


@settings(max_examples=200, deadline=None)
@given(arc_lists, st.tuples(st.integers(0, 5), st.integers(0, 5), caps))
def test_adding_an_arc_never_decreases_flow(arcs, extra):
    before = max_flow(FlowNetwork(6, 0, 5, arcs))
    after = max_flow(FlowNetwork(6, 0, 5, arcs + [extra]))
    assert after >= before - 1e-9
