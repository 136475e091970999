"""Search states, per-node label sets, the OPEN heap and the reserve queue.

Shared by the incremental planner and the from-scratch baseline. States live
in an id-keyed arena and refer to each other by id, so subtree deletion never
chases stale object references.
"""

from __future__ import annotations

import heapq
import json
from collections.abc import Callable, Iterable

from .costvec import INF, CostVec, dominates


class State:
    __slots__ = ("id", "node", "g", "parent", "children")

    def __init__(self, sid: int, node: int, g: CostVec, parent: int | None = None):
        self.id = sid
        self.node = node
        self.g = g
        self.parent = parent
        self.children: set[int] = set()

    def __repr__(self) -> str:
        return f"State(id={self.id}, node={self.node}, g={self.g}, parent={self.parent})"


class LabelStore:
    """G-sets, V-sets and the state arena for one search session.

    ``G[u]`` maps each label at ``u`` to the id of the state owning it, which
    makes the owner map a bijection by construction. ``V[u]`` is a plain set
    of labels.
    """

    def __init__(self, num_nodes: int):
        self.G: list[dict[CostVec, int]] = [{} for _ in range(num_nodes)]
        self.V: list[set[CostVec]] = [set() for _ in range(num_nodes)]
        self.states: dict[int, State] = {}
        self._next_id = 0

    def new_state(self, node: int, g: CostVec, parent: int | None = None) -> State:
        """Create a state, register its label in G(node) and link it under ``parent``."""
        if g in self.G[node]:
            raise AssertionError(f"label {g} already owned at node {node}")
        s = State(self._next_id, node, g)
        self._next_id += 1
        self.states[s.id] = s
        self.G[node][g] = s.id
        if parent is not None:
            # a fresh state has no descendants, so no cycle check is needed
            s.parent = parent
            self.states[parent].children.add(s.id)
        return s

    def is_live(self, s: State) -> bool:
        return self.G[s.node].get(s.g) == s.id

    def owner(self, node: int, g: CostVec) -> State:
        return self.states[self.G[node][g]]

    def is_consistent(self, s: State) -> bool:
        return s.g in self.V[s.node]

    def tree_link(self, parent: State, child: State) -> None:
        if child.parent is not None:
            raise AssertionError(f"state {child.id} already has a parent")
        if parent.id == child.id:
            raise AssertionError("cannot link a state to itself")
        # walking up from the parent must not meet the child
        p = parent
        while p.parent is not None:
            if p.parent == child.id:
                raise AssertionError("link would create a cycle")
            p = self.states[p.parent]
        child.parent = parent.id
        parent.children.add(child.id)

    def tree_unlink(self, s: State) -> None:
        if s.parent is not None:
            p = self.states.get(s.parent)
            if p is not None:
                p.children.discard(s.id)
            s.parent = None

    def drop(self, s: State) -> None:
        """Remove one state (not its subtree) from G, V, the tree and the arena."""
        if self.G[s.node].get(s.g) == s.id:
            del self.G[s.node][s.g]
        self.tree_unlink(s)
        for cid in s.children:
            c = self.states.get(cid)
            if c is not None:
                c.parent = None
        s.children = set()
        self.states.pop(s.id, None)

    def depth(self, s: State) -> int:
        d = 0
        while s.parent is not None:
            s = self.states[s.parent]
            d += 1
        return d

    def path_nodes(self, s: State) -> list[int]:
        """Nodes from ``s`` back to the root along parent links."""
        out = [s.node]
        while s.parent is not None:
            s = self.states[s.parent]
            out.append(s.node)
        return out

    def audit(self, root: int | None = None) -> None:
        """Raise ``AssertionError`` on any broken structural invariant."""
        for u, labels in enumerate(self.G):
            for g, sid in labels.items():
                s = self.states.get(sid)
                assert s is not None, f"G({u}) label {g} owned by dead state {sid}"
                assert s.node == u and s.g == g
        live = {sid for labels in self.G for sid in labels.values()}
        assert live == set(self.states), "arena and G-sets disagree"
        for u, vset in enumerate(self.V):
            for g in vset:
                assert g in self.G[u], f"V({u}) label {g} has no owning state"
            for a in vset:
                for b in vset:
                    assert not dominates(a, b), f"V({u}) holds {a} dominating {b}"
        for s in self.states.values():
            for cid in s.children:
                assert self.states[cid].parent == s.id
            if s.parent is None:
                assert root is None or s.id == root, f"orphan state {s}"
            else:
                assert s.id in self.states[s.parent].children
                assert self.depth(s) <= len(self.states)

    def dump(self) -> str:
        def enc(v):
            return ["inf" if x == INF else x for x in v]

        rows = []
        for u in range(len(self.G)):
            if self.G[u] or self.V[u]:
                rows.append(
                    {
                        "node": u,
                        "G": sorted(enc(g) for g in self.G[u]),
                        "V": sorted(enc(g) for g in self.V[u]),
                    }
                )
        return json.dumps(rows)


class OpenList:
    """Binary heap of states keyed by ``(f, g, id)`` with lazy invalidation.

    Entries whose state no longer owns its label are skipped on pop.
    """

    def __init__(self, store: LabelStore):
        self.store = store
        self._heap: list[tuple[CostVec, CostVec, int]] = []

    def push(self, s: State, f: CostVec) -> None:
        heapq.heappush(self._heap, (f, s.g, s.id))

    def pop(self) -> State | None:
        heap = self._heap
        states = self.store.states
        G = self.store.G
        while heap:
            _, g, sid = heapq.heappop(heap)
            s = states.get(sid)
            if s is not None and G[s.node].get(g) == sid:
                return s
        return None

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def ids(self) -> list[int]:
        return [e[2] for e in self._heap]

    def rebuild(self, ids: Iterable[int], key: Callable[[State], CostVec]) -> None:
        """Replace the contents with the live states among ``ids``, re-keyed."""
        entries = {}
        for sid in ids:
            s = self.store.states.get(sid)
            if s is not None and self.store.is_live(s):
                entries[sid] = (key(s), s.g, sid)
        self._heap = list(entries.values())
        heapq.heapify(self._heap)


class ReserveQueue:
    """States filtered by the current solutions, held for the next planning task."""

    def __init__(self):
        self._ids: dict[int, None] = {}

    def add(self, s: State) -> None:
        self._ids[s.id] = None

    def drain(self) -> list[int]:
        ids = list(self._ids)
        self._ids.clear()
        return ids

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, sid: int) -> bool:
        return sid in self._ids
