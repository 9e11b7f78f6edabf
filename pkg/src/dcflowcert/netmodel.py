"""Grid data model and JSON grid-file handling.

A network is a connected graph with exactly one slack bus (id 0, fixed
voltage) and N PQ buses (ids 1..N, fixed power injection; negative values
are loads). Branches are undirected, carry a positive conductance and a
thermal current limit, and at most one branch may join a pair of buses.
All quantities are caller-consistent (per-unit or SI throughout); the
library never converts units.

Grid-file schema (exact field names)::

    {
      "v0": 1.0, "v_min": 0.9, "v_max": 1.1,
      "buses":    [{"id": 1, "p": -0.5}, ...],
      "branches": [{"from": 0, "to": 1, "g": 10.0, "i_max": 1.0}, ...]
    }

Bus 0 is the implicit slack; ``buses`` lists PQ buses only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import SchemaError, TopologyError


class BusKind(Enum):
    SLACK = "slack"
    PQ = "pq"


@dataclass(frozen=True)
class Bus:
    """A single bus: the slack carries a voltage setpoint, PQ buses an injection."""

    id: int
    kind: BusKind
    voltage_setpoint: float | None = None
    injection: float | None = None

    def __post_init__(self):
        if self.id < 0:
            raise TopologyError(f"bus id must be nonnegative, got {self.id}")
        if self.kind is BusKind.SLACK:
            if self.voltage_setpoint is None or self.voltage_setpoint <= 0:
                raise ValueError("slack bus requires a positive voltage setpoint")
        else:
            if self.injection is None:
                raise ValueError(f"PQ bus {self.id} requires a power injection")


@dataclass(frozen=True)
class Branch:
    """Undirected line between two buses; endpoints are stored low-id first."""

    from_bus: int
    to_bus: int
    conductance: float
    current_limit: float

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise TopologyError(f"self-loop at bus {self.from_bus}")
        if self.conductance <= 0:
            raise ValueError(
                f"branch ({self.from_bus},{self.to_bus}): conductance must be positive"
            )
        if self.current_limit <= 0:
            raise ValueError(
                f"branch ({self.from_bus},{self.to_bus}): current limit must be positive"
            )
        if self.from_bus > self.to_bus:
            lo, hi = self.to_bus, self.from_bus
            object.__setattr__(self, "from_bus", lo)
            object.__setattr__(self, "to_bus", hi)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.from_bus, self.to_bus)


@dataclass(frozen=True)
class SecurityLimits:
    """Voltage band for all PQ buses. Degenerate bands (v_min == v_max) are
    allowed for direct construction; the grid-file parser requires v_min < v_max."""

    v_min: float
    v_max: float

    def __post_init__(self):
        if self.v_min <= 0:
            raise ValueError("v_min must be positive")
        if self.v_min > self.v_max:
            raise ValueError("v_min must not exceed v_max")


@dataclass(frozen=True)
class Condition1Verdict:
    """Outcome of the voltage-band precondition 2*v_min > v_max > v0 > v_min."""

    holds: bool
    margins: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {"holds": self.holds, "margins": list(self.margins)}


@dataclass(frozen=True, eq=False)
class Network:
    """Validated, immutable grid. Safe to share read-only across workers."""

    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    limits: SecurityLimits

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        ids = [b.id for b in self.buses]
        slack_ids = [b.id for b in self.buses if b.kind is BusKind.SLACK]
        if slack_ids != [0]:
            raise TopologyError("exactly one slack bus with id 0 is required")
        if len(set(ids)) != len(ids):
            raise TopologyError("duplicate bus ids")
        n = len(ids) - 1
        if n < 1:
            raise TopologyError("at least one PQ bus is required")
        if sorted(ids) != list(range(n + 1)):
            raise TopologyError("PQ bus ids must be contiguous 1..N")
        if ids != sorted(ids):
            raise TopologyError("buses must be listed in ascending id order")

        seen: set[tuple[int, int]] = set()
        for br in self.branches:
            if br.from_bus > n or br.to_bus > n:
                raise TopologyError(
                    f"branch ({br.from_bus},{br.to_bus}) references an unknown bus"
                )
            if br.pair in seen:
                raise TopologyError(
                    f"duplicate branch between buses {br.from_bus} and {br.to_bus}"
                )
            seen.add(br.pair)

        # connectivity from the slack bus
        adj: dict[int, set[int]] = {i: set() for i in range(n + 1)}
        for br in self.branches:
            adj[br.from_bus].add(br.to_bus)
            adj[br.to_bus].add(br.from_bus)
        reached = {0}
        frontier = [0]
        while frontier:
            node = frontier.pop()
            for nb in adj[node]:
                if nb not in reached:
                    reached.add(nb)
                    frontier.append(nb)
        if len(reached) != n + 1:
            missing = sorted(set(range(n + 1)) - reached)
            raise TopologyError(f"disconnected network: buses {missing} unreachable from slack")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.buses == other.buses
            and self.branches == other.branches
            and self.limits == other.limits
        )

    # -- topology queries ---------------------------------------------------

    @cached_property
    def n_pq(self) -> int:
        return len(self.buses) - 1

    @cached_property
    def v0(self) -> float:
        return float(self.buses[0].voltage_setpoint)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {b.id: set() for b in self.buses}
        for br in self.branches:
            adj[br.from_bus].add(br.to_bus)
            adj[br.to_bus].add(br.from_bus)
        return {i: frozenset(s) for i, s in adj.items()}

    def neighbors(self, n: int) -> frozenset[int]:
        return self.adjacency[n]

    def touches_slack(self, n: int) -> bool:
        """Indicator of the slack bus among n's neighbours."""
        return 0 in self.adjacency[n]

    @cached_property
    def _branch_by_pair(self) -> dict[tuple[int, int], Branch]:
        return {br.pair: br for br in self.branches}

    def branch_between(self, n: int, k: int) -> Branch:
        pair = (n, k) if n < k else (k, n)
        try:
            return self._branch_by_pair[pair]
        except KeyError:
            raise KeyError(f"no branch between buses {n} and {k}") from None

    # -- cached numeric views used by the load-flow kernels ------------------

    @cached_property
    def injections(self) -> np.ndarray:
        """Power injections (p_1, ..., p_N)."""
        p = np.array([b.injection for b in self.buses[1:]], dtype=float)
        p.flags.writeable = False
        return p

    @cached_property
    def incident_sum(self) -> np.ndarray:
        """Per-PQ-bus sum of incident conductances (slack lines included)."""
        g = np.zeros(self.n_pq)
        for br in self.branches:
            for end, other in ((br.from_bus, br.to_bus), (br.to_bus, br.from_bus)):
                if end >= 1:
                    g[end - 1] += br.conductance
        g.flags.writeable = False
        return g

    @cached_property
    def pq_coupling(self) -> np.ndarray:
        """Symmetric N x N matrix of conductances between PQ pairs (zero diagonal)."""
        w = np.zeros((self.n_pq, self.n_pq))
        for br in self.branches:
            if br.from_bus >= 1:
                w[br.from_bus - 1, br.to_bus - 1] = br.conductance
                w[br.to_bus - 1, br.from_bus - 1] = br.conductance
        w.flags.writeable = False
        return w

    @cached_property
    def slack_coupling(self) -> np.ndarray:
        """Per-PQ-bus conductance to the slack (zero when not adjacent)."""
        g0 = np.zeros(self.n_pq)
        for br in self.branches:
            if br.from_bus == 0:
                g0[br.to_bus - 1] = br.conductance
        g0.flags.writeable = False
        return g0


# -- schema helpers ----------------------------------------------------------


def _require(doc: dict, key: str, ctx: str):
    if key not in doc:
        raise SchemaError(f"missing field '{key}' in {ctx}")
    return doc[key]


def _number(doc: dict, key: str, ctx: str) -> float:
    raw = _require(doc, key, ctx)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SchemaError(f"field '{key}' in {ctx} must be a number")
    value = float(raw)
    if not math.isfinite(value):
        raise SchemaError(f"field '{key}' in {ctx} must be finite")
    return value


def _integer(doc: dict, key: str, ctx: str) -> int:
    raw = _require(doc, key, ctx)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise SchemaError(f"field '{key}' in {ctx} must be an integer")
    return raw


def parse_network(text: str) -> Network:
    """Parse and fully validate a grid file.

    Raises:
        SchemaError: malformed JSON, missing or ill-typed fields.
        TopologyError: structural problems (second slack, duplicate or
            dangling branches, non-contiguous ids, disconnected graph).
        ValueError: nonpositive conductances, current limits, or voltage
            limits, or an empty voltage band.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("grid file must be a JSON object")

    v0 = _number(doc, "v0", "grid file")
    v_min = _number(doc, "v_min", "grid file")
    v_max = _number(doc, "v_max", "grid file")
    buses_raw = _require(doc, "buses", "grid file")
    branches_raw = _require(doc, "branches", "grid file")
    if not isinstance(buses_raw, list) or not isinstance(branches_raw, list):
        raise SchemaError("'buses' and 'branches' must be arrays")

    if v0 <= 0:
        raise ValueError("slack voltage v0 must be positive")
    if v_min <= 0:
        raise ValueError("v_min must be positive")
    if v_min >= v_max:
        raise ValueError("v_min must be strictly below v_max")

    buses = [Bus(id=0, kind=BusKind.SLACK, voltage_setpoint=v0)]
    for pos, entry in enumerate(buses_raw):
        if not isinstance(entry, dict):
            raise SchemaError(f"buses[{pos}] must be an object")
        bus_id = _integer(entry, "id", f"buses[{pos}]")
        p = _number(entry, "p", f"buses[{pos}]")
        if bus_id == 0:
            raise TopologyError("bus id 0 is reserved for the slack bus")
        buses.append(Bus(id=bus_id, kind=BusKind.PQ, injection=p))
    buses.sort(key=lambda b: b.id)

    branches = []
    for pos, entry in enumerate(branches_raw):
        if not isinstance(entry, dict):
            raise SchemaError(f"branches[{pos}] must be an object")
        branches.append(
            Branch(
                from_bus=_integer(entry, "from", f"branches[{pos}]"),
                to_bus=_integer(entry, "to", f"branches[{pos}]"),
                conductance=_number(entry, "g", f"branches[{pos}]"),
                current_limit=_number(entry, "i_max", f"branches[{pos}]"),
            )
        )
    branches.sort(key=lambda br: br.pair)

    return Network(tuple(buses), tuple(branches), SecurityLimits(v_min, v_max))


def serialize_network(net: Network) -> str:
    """Serialize back to the grid-file schema; parsing the result reproduces ``net``."""
    doc = {
        "v0": net.v0,
        "v_min": net.limits.v_min,
        "v_max": net.limits.v_max,
        "buses": [{"id": b.id, "p": b.injection} for b in net.buses[1:]],
        "branches": [
            {"from": br.from_bus, "to": br.to_bus, "g": br.conductance, "i_max": br.current_limit}
            for br in net.branches
        ],
    }
    return json.dumps(doc, indent=2)


def check_condition1(net: Network) -> Condition1Verdict:
    """Check the strict chain 2*v_min > v_max > v0 > v_min.

    The three margins are (2*v_min - v_max, v_max - v0, v0 - v_min); the
    verdict holds when all of them are strictly positive.
    """
    v_min, v_max, v0 = net.limits.v_min, net.limits.v_max, net.v0
    margins = (2.0 * v_min - v_max, v_max - v0, v0 - v_min)
    return Condition1Verdict(holds=all(m > 0 for m in margins), margins=margins)


def scale_injections(net: Network, factor: float) -> Network:
    """New network with every PQ injection multiplied by ``factor``."""
    buses = tuple(
        b if b.kind is BusKind.SLACK else replace(b, injection=factor * b.injection)
        for b in net.buses
    )
    return Network(buses, net.branches, net.limits)
