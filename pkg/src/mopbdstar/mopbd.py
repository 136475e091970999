"""Incremental multi-objective path-based D* Lite (MOPBD*).

The search runs backwards: every state is a partial path rooted at the
destination ``u_d``; the robot's current node ``u_c`` is the search goal.
G(u) holds every label generated at ``u``; V(u) holds the labels already
expanded there, and a state is inconsistent while its label is in G but
not in V. Each planning task
pops inconsistent states in lexicographic f-order until OPEN is empty;
states filtered by the current solutions are parked in a reserve queue and
re-enter OPEN for the next task.
"""

from __future__ import annotations

import json
from collections.abc import Callable
from dataclasses import dataclass

from .base import Deadline, PlannerStats
from .costvec import INF, CostVec, eps_dominates, nd_filter, zeros
from .graph import DynGraph
from .labels import LabelStore, OpenList, ReserveQueue, State

Heuristic = Callable[[int, int], CostVec]


@dataclass
class PlannerConfig:
    eps: float = 0.0
    nd_kernel: str = "naive"  # "naive" or "kung" (kung only applies when M == 2)
    heuristic: Heuristic | None = None

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.nd_kernel not in ("naive", "kung"):
            raise ValueError(f"unknown ND kernel {self.nd_kernel!r}")


class MOPBDStar:
    """One incremental planning session on a mutable graph."""

    name = "mopbd"

    def __init__(self, graph: DynGraph, u_d: int, u_c: int, config: PlannerConfig | None = None):
        for label, node in (("u_d", u_d), ("u_c", u_c)):
            if not 0 <= node < graph.num_nodes:
                raise ValueError(f"{label}={node} is not a node of the graph")
        self.graph = graph
        self.config = config or PlannerConfig()
        self.eps = self.config.eps
        m = graph.m
        self._h = self.config.heuristic or (lambda u, t, _z=zeros(m): _z)
        self.u_d = u_d
        self.u_c = u_c
        self.store = LabelStore(graph.num_nodes)
        self.open = OpenList(self.store)
        self.reserve = ReserveQueue()
        self.stats = PlannerStats()
        self.deadline = Deadline()
        root = self.store.new_state(u_d, zeros(m))
        self.root_id = root.id
        self.open.push(root, self.f(root))

    # -- helpers ---------------------------------------------------------

    def f(self, s: State) -> CostVec:
        h = self._h(s.node, self.u_c)
        return tuple(a + b for a, b in zip(s.g, h))

    def _covered(self, vec: CostVec, labels) -> bool:
        """Some label weakly (or eps-) dominates ``vec``."""
        if self.eps:
            eps = self.eps
            return any(eps_dominates(g, vec, eps) for g in labels)
        for g in labels:
            for a, b in zip(g, vec):
                if a > b:
                    break
            else:
                return True
        return False

    def _prunes(self, new: CostVec, old: CostVec) -> bool:
        """``new`` replaces ``old`` in a V-set.

        Always plain weak dominance, even with eps > 0: eps-dominance is not
        transitive, so eps-replacement can cycle (a -> b -> c -> a) forever.
        """
        return all(a <= b for a, b in zip(new, old))

    # -- planner interface ----------------------------------------------

    def set_start(self, u_c: int) -> None:
        if not 0 <= u_c < self.graph.num_nodes:
            raise ValueError(f"u_c={u_c} is not a node of the graph")
        self.u_c = u_c

    def compute_path(self) -> list[CostVec]:
        """Run one planning task and return the front at ``u_c``, sorted."""
        store = self.store
        V = store.V
        opn = self.open
        # u_c may have moved since the keys were computed
        opn.rebuild(opn.ids(), self.f)
        while True:
            self.deadline.tick()
            s = opn.pop()
            if s is None:
                break
            self.stats.pops += 1
            if self._covered(self.f(s), V[self.u_c]):
                self.reserve.add(s)
                continue
            if self._covered(s.g, V[s.node]):
                # an inconsistent state never has children
                store.drop(s)
                continue
            self.update_vset(s)
            if not store.is_live(s):
                continue
            self.expand(s)
        opn.rebuild(self.reserve.drain(), self.f)
        return sorted(V[self.u_c])

    def expand(self, s: State) -> None:
        self.stats.expansions += 1
        store = self.store
        G = store.G
        graph = self.graph
        g = s.g
        for w in graph.neighbors(s.node):
            c = graph.cost(s.node, w)
            if INF in c:
                continue
            g2 = tuple(a + b for a, b in zip(g, c))
            gw = G[w]
            if g2 in gw or self._covered(g2, gw):
                continue
            s2 = store.new_state(w, g2, s.id)
            self.stats.generated += 1
            self.open.push(s2, self.f(s2))

    def delete_state(self, s: State, touched: dict[int, None]) -> None:
        """Remove ``s`` and its whole subtree, collecting every affected node in ``touched``."""
        store = self.store
        states = store.states
        if states.get(s.id) is not s:
            return
        order = []
        stack = [s.id]
        while stack:
            sid = stack.pop()
            order.append(sid)
            stack.extend(sorted(states[sid].children))
        for sid in reversed(order):
            st = states[sid]
            store.V[st.node].discard(st.g)
            # G-only labels may have pruned sibling candidates, so their node
            # needs re-deriving too
            touched[st.node] = None
            store.drop(st)
            self.stats.deletes += 1

    def update_vset(self, s: State) -> None:
        store = self.store
        u = s.node
        touched: dict[int, None] = {}
        for g_old in sorted(store.V[u]):
            if g_old == s.g:
                raise AssertionError(f"label {s.g} at node {u} is already consistent")
            if g_old in store.V[u] and self._prunes(s.g, g_old):
                self.delete_state(store.owner(u, g_old), touched)
        if store.is_live(s):
            store.V[u].add(s.g)
        self.repair_inconsistent(touched)

    def repair_inconsistent(self, nodes) -> None:
        """Regenerate the G-set of every node in ``nodes`` from its neighbours' V-sets."""
        store = self.store
        G, V = store.G, store.V
        graph = self.graph
        for u in sorted(nodes):
            self.deadline.tick()
            if u == self.u_d:
                continue
            source: dict[CostVec, tuple[int, CostVec]] = {}
            for w in graph.neighbors(u):
                c = graph.cost(u, w)
                if INF in c:
                    continue
                for v in V[w]:
                    cand = tuple(a + b for a, b in zip(v, c))
                    # neighbours come in ascending id order: first writer wins
                    if cand not in source:
                        source[cand] = (w, v)
            if not source:
                continue
            for g_new in sorted(nd_filter(source, self.config.nd_kernel)):
                if g_new in G[u]:
                    continue
                w, v = source[g_new]
                parent = store.owner(w, v)
                s2 = store.new_state(u, g_new, parent.id)
                self.stats.generated += 1
                self.open.push(s2, self.f(s2))

    def process_edge(self, u1: int, u2: int) -> None:
        """React to a cost change on edge ``(u1, u2)`` (already applied to the graph)."""
        if not self.graph.has_edge(u1, u2):
            raise ValueError(f"({u1}, {u2}) is not an edge")
        store = self.store
        touched: dict[int, None] = {}
        for u, other in ((u1, u2), (u2, u1)):
            for g in sorted(store.G[u]):
                sid = store.G[u].get(g)
                if sid is None:
                    continue
                s = store.states[sid]
                if s.parent is not None and store.states[s.parent].node == other:
                    self.delete_state(s, touched)
        # both endpoints are re-derived so cost decreases surface new labels
        touched[u1] = None
        touched[u2] = None
        self.repair_inconsistent(touched)

    # -- results ---------------------------------------------------------

    def front(self) -> list[CostVec]:
        return sorted(self.store.V[self.u_c])

    def paths(self) -> dict[CostVec, list[int]]:
        """One node sequence ``u_c -> ... -> u_d`` per front vector."""
        return {
            g: self.store.path_nodes(self.store.owner(self.u_c, g))
            for g in self.front()
        }

    def inconsistent_labels(self) -> set[tuple[int, CostVec]]:
        return {
            (u, g)
            for u, labels in enumerate(self.store.G)
            for g in labels
            if g not in self.store.V[u]
        }

    def audit(self) -> None:
        """Check tree and label invariants, plus that every inconsistent label is queued."""
        self.store.audit(root=self.root_id)
        queued = {
            (self.store.states[sid].node, self.store.states[sid].g)
            for sid in set(self.open.ids())
            if sid in self.store.states and self.store.is_live(self.store.states[sid])
        }
        missing = self.inconsistent_labels() - queued
        assert not missing, f"inconsistent labels missing from OPEN: {sorted(missing)[:5]}"

    def snapshot(self) -> str:
        keys = []
        for sid in sorted(set(self.open.ids())):
            s = self.store.states.get(sid)
            if s is not None and self.store.is_live(s):
                keys.append({"id": sid, "node": s.node, "f": list(self.f(s))})
        return json.dumps(
            {
                "u_d": self.u_d,
                "u_c": self.u_c,
                "labels": json.loads(self.store.dump()),
                "open": keys,
            }
        )
