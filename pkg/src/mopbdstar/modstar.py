"""Simplified MOD*: node-based incremental multi-objective search.

Each node keeps a G-set derived from its neighbours' V-sets and a V-set
fixed at its last expansion. Expanding a node copies G into V and re-derives
the G-sets of its neighbours. A node is consistent when both sets coincide.
"""

from __future__ import annotations

import heapq

from .base import Deadline, PlannerStats
from .costvec import INF, CostVec, nd_filter, zeros
from .graph import DynGraph


class MODStar:
    name = "mod"

    def __init__(self, graph: DynGraph, u_d: int, u_c: int, config=None):
        for label, node in (("u_d", u_d), ("u_c", u_c)):
            if not 0 <= node < graph.num_nodes:
                raise ValueError(f"{label}={node} is not a node of the graph")
        self.graph = graph
        self.u_d = u_d
        self.u_c = u_c
        m = graph.m
        heuristic = getattr(config, "heuristic", None) if config is not None else None
        self._h = heuristic or (lambda u, t, _z=zeros(m): _z)
        self.nd_kernel = getattr(config, "nd_kernel", "naive") if config is not None else "naive"
        n = graph.num_nodes
        self.G: list[frozenset] = [frozenset()] * n
        self.V: list[frozenset] = [frozenset()] * n
        self.G[u_d] = frozenset([zeros(m)])
        self.stats = PlannerStats()
        self.deadline = Deadline()
        # inconsistent nodes; keys are recomputed whenever a node is (re)queued
        self._open: set[int] = {u_d}
        self._heap: list = []
        self._version = [0] * n

    def derive_g(self, u: int) -> frozenset:
        if u == self.u_d:
            return frozenset([zeros(self.graph.m)])
        cands = []
        for w in self.graph.neighbors(u):
            c = self.graph.cost(u, w)
            if INF in c:
                continue
            for v in self.V[w]:
                cands.append(tuple(a + b for a, b in zip(v, c)))
        return frozenset(nd_filter(cands, self.nd_kernel))

    def is_consistent(self, u: int) -> bool:
        return self.G[u] == self.V[u]

    def _pending(self, u: int) -> set:
        """Labels that an expansion of ``u`` would add to or remove from V(u)."""
        return self.G[u] ^ self.V[u]

    def _key(self, u: int) -> CostVec:
        h = self._h(u, self.u_c)
        return min(tuple(a + b for a, b in zip(g, h)) for g in self._pending(u))

    def _push(self, u: int) -> None:
        self._version[u] += 1
        heapq.heappush(self._heap, (self._key(u), u, self._version[u]))

    def _refresh(self, u: int) -> None:
        if self.is_consistent(u):
            self._open.discard(u)
            self._version[u] += 1
        else:
            self._open.add(u)
            self._push(u)

    def _unsupported(self, u: int) -> bool:
        """Some V label is neither in G nor weakly dominated by a G label."""
        for v in self.V[u] - self.G[u]:
            if not any(all(a <= b for a, b in zip(g, v)) for g in self.G[u]):
                return True
        return False

    def _deferrable(self, u: int, front) -> bool:
        """Only new labels whose f-vectors are all covered by the front remain."""
        if self.V[u] - self.G[u]:
            return False
        h = self._h(u, self.u_c)
        for g in self.G[u] - self.V[u]:
            f = tuple(a + b for a, b in zip(g, h))
            if not any(all(x <= y for x, y in zip(c, f)) for c in front):
                return False
        return True

    def set_start(self, u_c: int) -> None:
        if not 0 <= u_c < self.graph.num_nodes:
            raise ValueError(f"u_c={u_c} is not a node of the graph")
        self.u_c = u_c

    def process_edge(self, u1: int, u2: int) -> None:
        if not self.graph.has_edge(u1, u2):
            raise ValueError(f"({u1}, {u2}) is not an edge")
        for u in (u1, u2):
            self.G[u] = self.derive_g(u)
            self._refresh(u)

    def compute_path(self) -> list[CostVec]:
        self._heap = []
        for u in sorted(self._open):
            self._push(u)
        deferred: list[int] = []
        while self._heap:
            self.deadline.tick()
            _, u, ver = heapq.heappop(self._heap)
            if ver != self._version[u] or u not in self._open:
                continue
            self.stats.pops += 1
            front = self.V[self.u_c]
            if u != self.u_c and self.is_consistent(self.u_c) and self._deferrable(u, front):
                deferred.append(u)
                continue
            self.stats.expansions += 1
            old_front = front
            if self._unsupported(u):
                # like v = inf in D* Lite: retract labels that lost their support
                # first, and let the node come back for its new labels later
                self.V[u] = self.V[u] & self.G[u]
            else:
                self.V[u] = self.G[u]
            self._refresh(u)
            for w in self.graph.neighbors(u):
                new_g = self.derive_g(w)
                if new_g != self.G[w]:
                    self.G[w] = new_g
                    self._refresh(w)
            if u == self.u_c and self.V[u] != old_front:
                # the front moved, so parked nodes must be judged again
                for d in deferred:
                    if d in self._open:
                        self._push(d)
                deferred = []
        return sorted(self.V[self.u_c])

    def front(self) -> list[CostVec]:
        return sorted(self.V[self.u_c])

    def paths(self) -> dict[CostVec, list[int]]:
        """Walk V-sets from ``u_c`` to ``u_d``, taking the lowest-id neighbour at each step."""
        out = {}
        for g in self.front():
            nodes = [self.u_c]
            u, rem = self.u_c, g
            while u != self.u_d:
                for w in self.graph.neighbors(u):
                    c = self.graph.cost(u, w)
                    if INF in c:
                        continue
                    prev = tuple(a - b for a, b in zip(rem, c))
                    if prev in self.V[w]:
                        u, rem = w, prev
                        nodes.append(w)
                        break
                else:
                    raise AssertionError(f"no predecessor for {rem} at node {u}")
            out[g] = nodes
        return out

    def audit(self) -> None:
        """Every G-set must equal the one derived from its neighbours' V-sets."""
        for u in range(self.graph.num_nodes):
            if u not in self._open:
                assert self.is_consistent(u), f"node {u} inconsistent but not queued"
            assert self.G[u] == self.derive_g(u), f"G({u}) is stale"
