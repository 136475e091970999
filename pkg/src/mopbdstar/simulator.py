"""Dynamic replanning simulator and per-task metrics.

A robot follows one Pareto-optimal path from ``u_o`` to ``u_d``. Every ``k``
moves the environment changes (one obstacle ahead on the path, or two random
obstacles added/removed near the robot) and every active planner replans.
All planners in one run see the same scenario: the environment stream and the
cost stream are seeded from the instance seed alone, and the robot's path is
reconstructed canonically from the leading planner's front, so planners with
equal fronts drive identical event sequences.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import io
import json
import logging
import statistics
import time
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from .base import Deadline, PlannerTimeout
from .costvec import INF, CostVec
from .graph import (
    DynGraph,
    EdgeChange,
    GridHeuristic,
    GridMap,
    add_obstacle,
    assign_random_costs,
    path_cost,
    path_is_open,
    remove_obstacle,
)
from .modstar import MODStar
from .mopbd import MOPBDStar, PlannerConfig
from .namoa import NAMOAStar

log = logging.getLogger(__name__)

PLANNERS = ("mopbd", "mopbd-i", "mopbd-eps", "namoa", "namoa-eps", "mod")
PROTOCOLS = ("ahead", "multi")


def make_planner(name: str, graph: DynGraph, u_d: int, u_c: int, eps: float = 0.0):
    heuristic = GridHeuristic(graph.grid, graph.m) if graph.grid is not None else None
    if name not in PLANNERS:
        raise ValueError(f"unknown planner {name!r}; choose from {', '.join(PLANNERS)}")
    use_eps = eps if name.endswith("-eps") else 0.0
    kernel = "kung" if name == "mopbd-i" else "naive"
    config = PlannerConfig(eps=use_eps, nd_kernel=kernel, heuristic=heuristic)
    if name.startswith("mopbd"):
        return MOPBDStar(graph, u_d, u_c, config)
    if name.startswith("namoa"):
        return NAMOAStar(graph, u_d, u_c, config)
    return MODStar(graph, u_d, u_c, config)


@dataclass
class SimConfig:
    grid: GridMap
    m: int = 2
    lo: int | None = None
    hi: int | None = None
    k: int = 7
    time_limit: float | None = None
    seed: int = 0
    planners: tuple[str, ...] = ("mopbd",)
    eps: float = 0.0
    protocol: str = "ahead"
    max_moves: int | None = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.m < 1:
            raise ValueError("M must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if not self.planners:
            raise ValueError("at least one planner is required")
        for p in self.planners:
            if p not in PLANNERS:
                raise ValueError(f"unknown planner {p!r}")
        multi = self.protocol == "multi"
        if self.lo is None:
            self.lo = 1
        if self.hi is None:
            self.hi = 5 if multi else 10
        if self.time_limit is None:
            self.time_limit = 300.0 if multi else 60.0
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"need 1 <= lo <= hi, got {self.lo}, {self.hi}")
        if self.max_moves is None:
            self.max_moves = 4 * self.grid.num_nodes


@dataclass
class TaskRecord:
    instance: int
    task: int
    planner: str
    eps: float
    expansions: int
    runtime_s: float
    solutions: int
    lk_over_l0: float | None
    event: str
    seed: int = 0
    lk: float | None = None
    timed_out: bool = False
    front: list = field(default_factory=list)

    CSV_FIELDS = (
        "instance",
        "task",
        "planner",
        "eps",
        "expansions",
        "runtime_s",
        "solutions",
        "lk_over_l0",
        "event",
    )

    def to_json(self) -> str:
        d = asdict(self)
        d["front"] = [["inf" if x == INF else x for x in v] for v in self.front]
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str) -> "TaskRecord":
        d = json.loads(text)
        d["front"] = [tuple(INF if x == "inf" else x for x in v) for v in d["front"]]
        return cls(**d)


@dataclass
class InstanceResult:
    instance: int
    seed: int
    u_o: int
    u_d: int
    records: list[TaskRecord]
    aborted: bool = False
    timed_out: dict[str, int] = field(default_factory=dict)
    arrived: bool = False
    reselections: int = 0


# -- scenario helpers ------------------------------------------------------


def component_of(graph: DynGraph, src: int) -> list[int]:
    seen = {src}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in graph.neighbors(u):
            if w not in seen and INF not in graph.cost(u, w):
                seen.add(w)
                queue.append(w)
    return sorted(seen)


def sample_endpoints(graph: DynGraph, grid: GridMap, rng: np.random.Generator) -> tuple[int, int]:
    nodes = grid.passable_nodes()
    for _ in range(1000):
        u_d = int(nodes[rng.integers(len(nodes))])
        comp = [u for u in component_of(graph, u_d) if u != u_d]
        if comp:
            return int(comp[rng.integers(len(comp))]), u_d
    raise ValueError("map has no two connected passable cells")


def objective_distances(graph: DynGraph, dst: int) -> list[list[float]]:
    """Per-objective shortest distance from every node to ``dst``."""
    out = []
    for m in range(graph.m):
        dist = [INF] * graph.num_nodes
        dist[dst] = 0
        heap = [(0, dst)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for w in graph.neighbors(u):
                c = graph.cost(u, w)[m]
                if c == INF:
                    continue
                if d + c < dist[w]:
                    dist[w] = d + c
                    heapq.heappush(heap, (d + c, w))
        out.append(dist)
    return out


def pareto_labels(graph: DynGraph, src: int, goal: int, front) -> list[set]:
    """Every cost-unique Pareto-optimal path cost from ``src`` to each node that
    can still lie on a path to ``goal`` costing at most some ``front`` vector.

    Label-setting in lexicographic order of ``g + lower``, where ``lower`` holds
    exact per-objective distances to ``goal``; popped labels are final.
    """
    lower = objective_distances(graph, goal)
    m = graph.m
    low = [tuple(lower[i][w] for i in range(m)) for w in range(graph.num_nodes)]
    bounds = sorted(tuple(t) for t in front)
    perm: list[set] = [set() for _ in range(graph.num_nodes)]
    if m == 2:
        # a sorted 2-D front has falling second entries, so the first bound with
        # a large enough first entry is the loosest one
        firsts = [t[0] for t in bounds]

        def fits(x):
            i = bisect.bisect_left(firsts, x[0])
            return i < len(bounds) and x[1] <= bounds[i][1]
    else:

        def fits(x):
            return any(all(a <= b for a, b in zip(x, t)) for t in bounds)

    # popped labels arrive at each node in lexicographic g order, so with two
    # objectives a label is covered iff its second entry is no better
    best2 = [INF] * graph.num_nodes

    def covered(g, u):
        if m == 2:
            return best2[u] <= g[1]
        return any(all(a <= b for a, b in zip(o, g)) for o in perm[u])

    zero = (0,) * m
    if not bounds or not fits(low[src]):
        return perm
    heap = [(low[src], zero, src)]
    while heap:
        _, g, u = heapq.heappop(heap)
        if covered(g, u):
            continue
        perm[u].add(g)
        best2[u] = g[1] if m >= 2 else g[0]
        for w in graph.neighbors(u):
            c = graph.cost(u, w)
            if INF in c:
                continue
            g2 = tuple(a + b for a, b in zip(g, c))
            if covered(g2, w):
                continue
            f2 = tuple(a + b for a, b in zip(g2, low[w]))
            if fits(f2):
                heapq.heappush(heap, (f2, g2, w))
    return perm


def canonical_paths(
    graph: DynGraph, src: int, dst: int, front, strict: bool = True
) -> dict[CostVec, list[int]]:
    """One planner-independent path ``src -> ... -> dst`` per front vector.

    Walks from ``src`` and always steps to the lowest-id neighbour whose
    remaining budget is itself a Pareto-optimal cost to ``dst``; since every
    sub-path of a Pareto-optimal path is Pareto-optimal, the walk never
    backtracks. Vectors that are not Pareto-optimal raise ``ValueError``, or
    are left out when ``strict`` is false.
    """
    labels = pareto_labels(graph, dst, src, front)
    out = {}
    for target in sorted(tuple(t) for t in front):
        if target not in labels[src]:
            if not strict:
                continue
            raise ValueError(f"{target} is not a Pareto-optimal cost from {src} to {dst}")
        path = [src]
        u, rem = src, target
        while u != dst:
            for w in graph.neighbors(u):
                c = graph.cost(u, w)
                if INF in c:
                    continue
                r2 = tuple(a - b for a, b in zip(rem, c))
                if r2 in labels[w]:
                    u, rem = w, r2
                    path.append(w)
                    break
            else:
                raise AssertionError(f"walk for {target} stuck at node {u}")
        out[target] = path
    return out


def mean_length(paths: dict) -> float:
    return statistics.fmean(len(p) - 1 for p in paths.values())


def window_nodes(grid: GridMap, center: int, radius: int = 2) -> list[int]:
    r0, c0 = grid.coords(center)
    out = []
    for r in range(r0 - radius, r0 + radius + 1):
        for c in range(c0 - radius, c0 + radius + 1):
            if grid.in_bounds(r, c) and grid.is_passable(grid.node(r, c)):
                out.append(grid.node(r, c))
    return out


# -- simulation ------------------------------------------------------------


class Simulation:
    """One test instance; drives every configured planner through the same scenario."""

    def __init__(self, config: SimConfig, instance: int = 0):
        self.config = config
        self.instance = instance
        ss = np.random.SeedSequence([config.seed, instance])
        env_ss, cost_ss = ss.spawn(2)
        self.env_rng = np.random.Generator(np.random.PCG64(env_ss))
        cost_seed = int(cost_ss.generate_state(1)[0])
        self.cost_rng = np.random.Generator(np.random.PCG64(cost_ss.spawn(1)[0]))
        self.grid = config.grid
        self.graph = assign_random_costs(config.grid, config.m, config.lo, config.hi, cost_seed)
        self.u_o, self.u_d = sample_endpoints(self.graph, self.grid, self.env_rng)
        self.u_c = self.u_o
        self.planners = {
            name: make_planner(name, self.graph, self.u_d, self.u_c, config.eps)
            for name in config.planners
        }
        self.active = list(config.planners)
        self.fronts: dict[str, list[CostVec]] = {}
        self.l0: dict[str, float] = {}
        self.path: list[int] = []
        self.records: list[TaskRecord] = []
        self.task = 0
        self.moves = 0
        self.aborted = False
        self.timed_out: dict[str, int] = {}
        self.reselections = 0
        self._add_next = True
        self._paths_cache: dict[tuple, dict] = {}

    @property
    def leader(self) -> str | None:
        return self.active[0] if self.active else None

    def _paths_for(self, name: str) -> dict[CostVec, list[int]]:
        """Paths for ``name``'s current front.

        Exact planners share planner-independent canonical paths, so the
        scenario does not depend on which exact planner leads. An eps front
        may hold dominated vectors and the exact front behind it can be huge,
        so eps planners use their own paths.
        """
        front = self.fronts[name]
        if name.endswith("-eps") and self.config.eps > 0:
            return self.planners[name].paths()
        key = tuple(front)
        if key not in self._paths_cache:
            self._paths_cache[key] = canonical_paths(self.graph, self.u_c, self.u_d, front)
        return self._paths_cache[key]

    def plan(self, event: str, changes: list[EdgeChange]) -> bool:
        """Run one planning task on every active planner; False once the leader has no front."""
        self._paths_cache = {}
        for name in list(self.active):
            p = self.planners[name]
            before = p.stats.snapshot()
            p.deadline = Deadline.after(self.config.time_limit)
            t0 = time.perf_counter()
            try:
                for ch in changes:
                    p.process_edge(ch.u, ch.w)
                front = p.compute_path()
            except PlannerTimeout:
                elapsed = time.perf_counter() - t0
                log.info("instance %d task %d: %s timed out", self.instance, self.task, name)
                self.records.append(
                    TaskRecord(
                        self.instance, self.task, name, p_eps(name, self.config.eps),
                        p.stats.since(before).expansions, elapsed, 0, None, event,
                        self.config.seed, None, True, [],
                    )
                )
                self.timed_out[name] = self.task
                self.active.remove(name)
                if not self.active or name == self.config.planners[0]:
                    self.aborted = True
                continue
            elapsed = time.perf_counter() - t0
            self.fronts[name] = front
            lk = mean_length(self._paths_for(name)) if front else None
            if self.task == 0 and lk is not None:
                self.l0[name] = lk
            l0 = self.l0.get(name)
            ratio = lk / l0 if lk is not None and l0 else None
            self.records.append(
                TaskRecord(
                    self.instance, self.task, name, p_eps(name, self.config.eps),
                    p.stats.since(before).expansions, elapsed, len(front), ratio, event,
                    self.config.seed, lk, False, list(front),
                )
            )
        self.task += 1
        if self.aborted or not self.active:
            return False
        return bool(self.fronts.get(self.leader))

    def select_path(self) -> None:
        paths = self._paths_for(self.leader)
        options = [paths[g] for g in sorted(paths)]
        self.path = options[int(self.env_rng.integers(len(options)))]

    def path_still_valid(self) -> bool:
        if not self.path or self.path[0] != self.u_c or not path_is_open(self.graph, self.path):
            return False
        return path_cost(self.graph, self.path) in set(self.fronts[self.leader])

    def place_obstacle_ahead(self) -> list[EdgeChange]:
        if len(self.path) < 2 or self.path[1] == self.u_d:
            return []
        return add_obstacle(self.graph, self.path[1])

    def multi_obstacle_event(self) -> tuple[str, list[EdgeChange]]:
        eligible = [u for u in window_nodes(self.grid, self.u_c) if u not in (self.u_c, self.u_d)]
        count = min(2, len(eligible))
        picks = sorted(int(x) for x in self.env_rng.choice(eligible, size=count, replace=False)) if count else []
        adding = self._add_next
        self._add_next = not self._add_next
        changes: list[EdgeChange] = []
        for u in picks:
            if adding:
                changes += add_obstacle(self.graph, u)
            else:
                changes += remove_obstacle(self.graph, u, self.config.lo, self.config.hi, self.cost_rng)
        kind = "add" if adding else "delete"
        return f"{kind}:{','.join(map(str, picks))}", changes

    def follow_path(self) -> int:
        self.u_c = self.path[1]
        self.path = self.path[1:]
        self.moves += 1
        for name in self.active:
            self.planners[name].set_start(self.u_c)
        return self.u_c

    def run(self) -> InstanceResult:
        if self.plan("init", []):
            self.select_path()
            while self.u_c != self.u_d and self.moves < self.config.max_moves:
                if self.moves > 0 and self.moves % self.config.k == 0:
                    if self.config.protocol == "ahead":
                        ahead = self.path[1] if len(self.path) > 1 else None
                        changes = self.place_obstacle_ahead()
                        event = f"add:{ahead}"
                    else:
                        event, changes = self.multi_obstacle_event()
                    if changes:
                        if not self.plan(event, changes):
                            break
                        if not self.path_still_valid():
                            self.reselections += 1
                            log.debug("instance %d: reselecting path at task %d", self.instance, self.task)
                            self.select_path()
                self.follow_path()
        return InstanceResult(
            self.instance, self.config.seed, self.u_o, self.u_d, self.records,
            self.aborted, dict(self.timed_out), self.u_c == self.u_d, self.reselections,
        )


def p_eps(name: str, eps: float) -> float:
    return eps if name.endswith("-eps") else 0.0


def run_instance(config: SimConfig, instance: int = 0) -> InstanceResult:
    return Simulation(config, instance).run()


def _run_one(args):
    config, instance = args
    return run_instance(config, instance)


def run_batch(config: SimConfig, instances: int, workers: int = 1) -> list[InstanceResult]:
    jobs = [(config, i) for i in range(instances)]
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


# -- metrics ---------------------------------------------------------------


def subsequent(records, planner: str | None = None, event_kind: str | None = None):
    out = [r for r in records if r.task > 0 and not r.timed_out]
    if planner is not None:
        out = [r for r in out if r.planner == planner]
    if event_kind is not None:
        out = [r for r in out if r.event.startswith(event_kind + ":")]
    return out


def summarize(results: list[InstanceResult]) -> list[dict]:
    """Per-planner averages over all subsequent tasks of all instances; the initial task is reported separately."""
    records = [r for res in results for r in res.records]
    planners = list(dict.fromkeys(r.planner for r in records))
    rows = []
    for name in planners:
        sub = subsequent(records, name)
        init = [r for r in records if r.planner == name and r.task == 0 and not r.timed_out]
        rows.append(
            {
                "planner": name,
                "tasks": len(sub),
                "exp": statistics.fmean(r.expansions for r in sub) if sub else None,
                "rt": statistics.fmean(r.runtime_s for r in sub) if sub else None,
                "sol": statistics.fmean(r.solutions for r in sub) if sub else None,
                "init_exp": statistics.fmean(r.expansions for r in init) if init else None,
                "init_rt": statistics.fmean(r.runtime_s for r in init) if init else None,
                "timeouts": sum(1 for r in records if r.planner == name and r.timed_out),
            }
        )
    return rows


def replan_times(results: list[InstanceResult], planner: str, event_kind: str) -> list[float]:
    records = [r for res in results for r in res.records]
    return [r.runtime_s for r in subsequent(records, planner, event_kind)]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TaskRecord.CSV_FIELDS)
    for r in records:
        row = []
        for f in TaskRecord.CSV_FIELDS:
            v = getattr(r, f)
            row.append("" if v is None else repr(v) if isinstance(v, float) else v)
        w.writerow(row)
    return buf.getvalue()


def records_from_csv(text: str) -> list[dict]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        d: dict = {}
        for k in TaskRecord.CSV_FIELDS:
            v = row[k]
            if k in ("instance", "task", "expansions", "solutions"):
                d[k] = int(v)
            elif k in ("eps", "runtime_s"):
                d[k] = float(v)
            elif k == "lk_over_l0":
                d[k] = float(v) if v != "" else None
            else:
                d[k] = v
        out.append(d)
    return out


def csv_view(record: TaskRecord) -> dict:
    return {k: getattr(record, k) for k in TaskRecord.CSV_FIELDS}


def scatter_csv(records) -> str:
    """Plot-ready ``l_k/l_0`` vs runtime points for subsequent tasks."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "task", "planner", "eps", "x_lk_over_l0", "y_runtime_s"])
    for r in records:
        if r.task > 0 and not r.timed_out and r.lk_over_l0 is not None:
            w.writerow([r.instance, r.task, r.planner, repr(r.eps), repr(r.lk_over_l0), repr(r.runtime_s)])
    return buf.getvalue()
