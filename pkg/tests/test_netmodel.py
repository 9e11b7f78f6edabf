"""Grid model and parser tests."""

import json

import pytest

from dcflowcert.errors import SchemaError, TopologyError
from dcflowcert.netmodel import (
    Branch,
    SecurityLimits,
    check_condition1,
    parse_network,
    scale_injections,
    serialize_network,
)

from helpers import grid_text, random_network, two_bus


class TestParse:
    def test_two_bus(self):
        net = two_bus()
        assert net.n_pq == 1
        assert net.v0 == 1.0
        assert net.neighbors(1) == frozenset({0})
        assert net.touches_slack(1)
        assert net.injections[0] == -0.5
        assert net.limits.v_min == 0.9 and net.limits.v_max == 1.1

    def test_negative_conductance_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, -10.0, 1.0)])
        with pytest.raises(ValueError, match="conductance"):
            parse_network(text)

    def test_nonpositive_current_limit_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 0.0)])
        with pytest.raises(ValueError, match="current limit"):
            parse_network(text)

    def test_second_slack_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(0, -0.5), (1, -0.5)], [(0, 1, 10.0, 1.0)])
        with pytest.raises(TopologyError, match="slack"):
            parse_network(text)

    def test_disconnected_rejected(self):
        text = grid_text(
            1.0, 0.9, 1.1,
            [(1, -0.5), (2, -0.5), (3, -0.1)],
            [(0, 1, 10.0, 1.0), (2, 3, 5.0, 1.0)],
        )
        with pytest.raises(TopologyError, match="disconnected"):
            parse_network(text)

    def test_duplicate_branch_rejected(self):
        text = grid_text(
            1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 1.0), (1, 0, 5.0, 1.0)]
        )
        with pytest.raises(TopologyError, match="duplicate branch"):
            parse_network(text)

    def test_self_loop_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 1.0), (1, 1, 5.0, 1.0)])
        with pytest.raises(TopologyError, match="self-loop"):
            parse_network(text)

    def test_noncontiguous_ids_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(2, -0.5)], [(0, 2, 10.0, 1.0)])
        with pytest.raises(TopologyError, match="contiguous"):
            parse_network(text)

    def test_missing_field(self):
        doc = json.loads(grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 1.0)]))
        del doc["v_min"]
        with pytest.raises(SchemaError, match="v_min"):
            parse_network(json.dumps(doc))

    def test_ill_typed_field(self):
        doc = json.loads(grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 1.0)]))
        doc["buses"][0]["p"] = "heavy"
        with pytest.raises(SchemaError, match="number"):
            parse_network(json.dumps(doc))

    def test_invalid_json(self):
        with pytest.raises(SchemaError, match="invalid JSON"):
            parse_network("{not json")

    def test_empty_band_rejected(self):
        text = grid_text(1.0, 1.1, 0.9, [(1, -0.5)], [(0, 1, 10.0, 1.0)])
        with pytest.raises(ValueError, match="v_min"):
            parse_network(text)

    def test_nonfinite_rejected(self):
        text = grid_text(1.0, 0.9, 1.1, [(1, -0.5)], [(0, 1, 10.0, 1.0)]).replace(
            "-0.5", "NaN"
        )
        with pytest.raises(SchemaError, match="finite"):
            parse_network(text)


class TestInvariants:
    def test_round_trip(self):
        for seed in range(25):
            net = random_network(seed, meshed=(seed % 2 == 0))
            again = parse_network(serialize_network(net))
            assert again == net

    def test_adjacency_symmetric(self):
        for seed in range(25):
            net = random_network(seed, meshed=True)
            for br in net.branches:
                assert br.to_bus in net.neighbors(br.from_bus)
                assert br.from_bus in net.neighbors(br.to_bus)
            for n, nbrs in net.adjacency.items():
                for k in nbrs:
                    assert n in net.adjacency[k]

    def test_branch_endpoints_normalized(self):
        br = Branch(from_bus=3, to_bus=1, conductance=2.0, current_limit=1.0)
        assert br.pair == (1, 3)

    def test_immutable(self):
        net = two_bus()
        with pytest.raises(AttributeError):
            net.limits = SecurityLimits(0.8, 1.2)

    def test_degenerate_limits_constructible_directly(self):
        lim = SecurityLimits(1.0, 1.0)
        assert lim.v_min == lim.v_max == 1.0


class TestCondition1:
    def test_holds(self):
        verdict = check_condition1(two_bus())
        assert verdict.holds
        assert verdict.margins == pytest.approx((0.7, 0.1, 0.1))

    def test_fails_on_low_v_min(self):
        verdict = check_condition1(two_bus(v_min=0.5))
        assert not verdict.holds
        assert verdict.margins[0] == pytest.approx(-0.1)

    def test_boundary_equality_fails(self):
        verdict = check_condition1(two_bus(v0=1.1))
        assert not verdict.holds
        assert verdict.margins[1] == pytest.approx(0.0)


def test_scale_injections():
    net = two_bus(p=-0.5)
    scaled = scale_injections(net, 3.0)
    assert scaled.injections[0] == pytest.approx(-1.5)
    assert scaled.branches == net.branches
    assert scale_injections(net, 0.0).injections[0] == 0.0
