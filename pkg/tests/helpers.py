"""Shared test factories: canonical small grids and the seeded random corpus."""

from __future__ import annotations

import json

import numpy as np

from dcflowcert.netmodel import Network, parse_network


def grid_text(v0, v_min, v_max, buses, branches) -> str:
    return json.dumps(
        {
            "v0": v0,
            "v_min": v_min,
            "v_max": v_max,
            "buses": [{"id": i, "p": p} for i, p in buses],
            "branches": [
                {"from": a, "to": b, "g": g, "i_max": i_max} for a, b, g, i_max in branches
            ],
        }
    )


def two_bus(p=-0.5, g=10.0, i_max=1.0, v_min=0.9, v_max=1.1, v0=1.0) -> Network:
    return parse_network(
        grid_text(v0, v_min, v_max, [(1, p)], [(0, 1, g, i_max)])
    )


def three_bus_chain(p1=-0.3, p2=-0.2, g01=10.0, g12=10.0, v_min=0.9, v_max=1.1,
                    i_max=50.0) -> Network:
    return parse_network(
        grid_text(
            1.0, v_min, v_max,
            [(1, p1), (2, p2)],
            [(0, 1, g01, i_max), (1, 2, g12, i_max)],
        )
    )


def star(n_leaves=4, g=10.0, p=-0.2, v_min=0.9, v_max=1.1, i_max=50.0) -> Network:
    buses = [(i, p) for i in range(1, n_leaves + 1)]
    branches = [(0, i, g, i_max) for i in range(1, n_leaves + 1)]
    return parse_network(grid_text(1.0, v_min, v_max, buses, branches))


def random_network(seed: int, n_max: int = 10, meshed: bool = False,
                   v_min: float = 0.9, v_max: float = 1.1,
                   load_scale: float = 0.05) -> Network:
    """Seeded random grid: a random tree rooted at the slack (or a pure star
    about a third of the time), optionally thickened with extra chords.
    Loads are drawn per bus in proportion to mean incident conductance and
    shrunk with network size so that typical draws stay well inside the
    voltage band."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    edges = {}
    if n > 1 and rng.random() < 0.3:
        parents = [0] * n
    else:
        parents = [int(rng.integers(0, i)) for i in range(1, n + 1)]
    for child, parent in enumerate(parents, start=1):
        edges[(min(parent, child), max(parent, child))] = float(rng.uniform(5.0, 20.0))
    if meshed and n >= 3:
        for _ in range(int(rng.integers(1, n // 2 + 1))):
            a = int(rng.integers(0, n + 1))
            b = int(rng.integers(0, n + 1))
            pair = (min(a, b), max(a, b))
            if a != b and pair not in edges:
                edges[pair] = float(rng.uniform(5.0, 20.0))

    incident = np.zeros(n + 1)
    degree = np.zeros(n + 1)
    for (a, b), g in edges.items():
        incident[a] += g
        incident[b] += g
        degree[a] += 1
        degree[b] += 1
    buses = []
    for i in range(1, n + 1):
        mean_g = incident[i] / degree[i]
        p = -float(rng.uniform(0.0, load_scale)) * mean_g / n
        buses.append((i, p))
    branches = [(a, b, g, 50.0) for (a, b), g in sorted(edges.items())]
    return parse_network(grid_text(1.0, v_min, v_max, buses, branches))


def corpus(count: int = 200, **kwargs) -> list[Network]:
    """Deterministic corpus: alternating radial and meshed draws."""
    return [
        random_network(seed, meshed=(seed % 2 == 1), **kwargs) for seed in range(count)
    ]
