from __future__ import annotations

import random

import pytest

from mopbdstar.graph import DynGraph, GridMap, assign_random_costs

A, B, C, D = range(4)


def diamond() -> DynGraph:
    g = DynGraph(4, 2)
    g.add_edge(A, B, (1, 3))
    g.add_edge(A, C, (3, 1))
    g.add_edge(B, D, (1, 3))
    g.add_edge(C, D, (3, 1))
    return g


def random_small(seed: int, m: int = 2, sizes=(3, 4), density: float = 0.2):
    """Seeded random grid graph plus two distinct passable endpoints."""
    rnd = random.Random(seed)
    while True:
        n = rnd.choice(sizes)
        rows = ["".join("@" if rnd.random() < density else "." for _ in range(n)) for _ in range(n)]
        grid = GridMap.from_rows(rows)
        cells = grid.passable_nodes()
        if len(cells) >= 2:
            break
    g = assign_random_costs(grid, m, 1, 10, seed)
    u_d, u_c = rnd.sample(cells, 2)
    return grid, g, u_d, u_c


@pytest.fixture
def diamond_graph() -> DynGraph:
    return diamond()
