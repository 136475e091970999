"""Exhaustive reference fronts for small graphs."""

from __future__ import annotations

from .costvec import INF, CostVec, nd_filter_naive
from .graph import DynGraph


def simple_path_costs(graph: DynGraph, src: int, dst: int, limit: int = 2_000_000) -> list[CostVec]:
    """Cost of every simple finite-cost path from ``src`` to ``dst`` (DFS)."""
    m = graph.m
    out: list[CostVec] = []
    on_path = [False] * graph.num_nodes
    stack = [(src, (0,) * m, iter(graph.neighbors(src)))]
    on_path[src] = True
    if src == dst:
        return [(0,) * m]
    while stack:
        u, g, it = stack[-1]
        w = next(it, None)
        if w is None:
            on_path[u] = False
            stack.pop()
            continue
        if on_path[w]:
            continue
        c = graph.cost(u, w)
        if INF in c:
            continue
        g2 = tuple(a + b for a, b in zip(g, c))
        if w == dst:
            out.append(g2)
            if len(out) > limit:
                raise RuntimeError("too many simple paths for exhaustive enumeration")
            continue
        on_path[w] = True
        stack.append((w, g2, iter(graph.neighbors(w))))
    return out


def exhaustive_front(graph: DynGraph, src: int, dst: int) -> list[CostVec]:
    return sorted(nd_filter_naive(simple_path_costs(graph, src, dst)))
