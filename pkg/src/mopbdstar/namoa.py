"""NAMOA*: path-based multi-objective A*, solved from scratch on every call."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .base import Deadline, PlannerStats
from .costvec import INF, CostVec, eps_dominates, zeros
from .graph import DynGraph
from .mopbd import Heuristic


class _Label:
    __slots__ = ("node", "g", "parent")

    def __init__(self, node: int, g: CostVec, parent: "_Label | None"):
        self.node = node
        self.g = g
        self.parent = parent


def _covered(vec, labels, eps):
    if eps:
        return any(eps_dominates(g, vec, eps) for g in labels)
    for g in labels:
        for a, b in zip(g, vec):
            if a > b:
                break
        else:
            return True
    return False


@dataclass
class NamoaResult:
    front: list[CostVec]
    paths: dict[CostVec, list[int]]
    stats: PlannerStats = field(default_factory=PlannerStats)


def solve(
    graph: DynGraph,
    u_d: int,
    u_c: int,
    heuristic: Heuristic | None = None,
    eps: float = 0.0,
    deadline: Deadline | None = None,
) -> NamoaResult:
    """Pareto front of paths between ``u_c`` and ``u_d``, searching backwards from ``u_d``.

    Candidates are pruned when some label at the same node, or some solution
    found so far (after adding the heuristic), weakly dominates them; with
    ``eps > 0`` eps-dominance is used instead. Paths run ``u_c -> ... -> u_d``.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    m = graph.m
    h = heuristic or (lambda u, t, _z=zeros(m): _z)
    deadline = deadline or Deadline()
    stats = PlannerStats()

    labels: list[set[CostVec]] = [set() for _ in range(graph.num_nodes)]
    closed: list[list[CostVec]] = [[] for _ in range(graph.num_nodes)]
    sols: list[_Label] = []
    sol_g: list[CostVec] = []

    counter = 0
    root = _Label(u_d, zeros(m), None)
    labels[u_d].add(root.g)
    heap = [(h(u_d, u_c), root.g, counter, root)]
    while heap:
        deadline.tick()
        f, g, _, lab = heapq.heappop(heap)
        stats.pops += 1
        u = lab.node
        if _covered(g, closed[u], eps) or _covered(f, sol_g, eps):
            continue
        closed[u].append(g)
        stats.expansions += 1
        if u == u_c:
            sols.append(lab)
            sol_g.append(g)
            continue
        for w in graph.neighbors(u):
            c = graph.cost(u, w)
            if INF in c:
                continue
            g2 = tuple(a + b for a, b in zip(g, c))
            if g2 in labels[w] or _covered(g2, labels[w], eps):
                continue
            f2 = tuple(a + b for a, b in zip(g2, h(w, u_c)))
            if _covered(f2, sol_g, eps):
                continue
            labels[w].add(g2)
            counter += 1
            stats.generated += 1
            heapq.heappush(heap, (f2, g2, counter, _Label(w, g2, lab)))

    paths = {}
    for lab in sols:
        nodes = []
        p = lab
        while p is not None:
            nodes.append(p.node)
            p = p.parent
        paths[lab.g] = nodes
    return NamoaResult(sorted(paths), paths, stats)


class NAMOAStar:
    """Planner-interface wrapper: edge changes are ignored, every task re-solves."""

    name = "namoa"

    def __init__(self, graph: DynGraph, u_d: int, u_c: int, config=None):
        for label, node in (("u_d", u_d), ("u_c", u_c)):
            if not 0 <= node < graph.num_nodes:
                raise ValueError(f"{label}={node} is not a node of the graph")
        self.graph = graph
        self.u_d = u_d
        self.u_c = u_c
        self.eps = getattr(config, "eps", 0.0) if config is not None else 0.0
        self.heuristic = getattr(config, "heuristic", None) if config is not None else None
        self.stats = PlannerStats()
        self.deadline = Deadline()
        self._last: NamoaResult | None = None

    def set_start(self, u_c: int) -> None:
        self.u_c = u_c

    def process_edge(self, u1: int, u2: int) -> None:
        if not self.graph.has_edge(u1, u2):
            raise ValueError(f"({u1}, {u2}) is not an edge")

    def compute_path(self) -> list[CostVec]:
        res = solve(self.graph, self.u_d, self.u_c, self.heuristic, self.eps, self.deadline)
        self.stats.expansions += res.stats.expansions
        self.stats.pops += res.stats.pops
        self.stats.generated += res.stats.generated
        self._last = res
        return res.front

    def front(self) -> list[CostVec]:
        return self._last.front if self._last else []

    def paths(self) -> dict[CostVec, list[int]]:
        return dict(self._last.paths) if self._last else {}
