"""Command-line entry points: bench, run, verify and scalarization-demo."""

from __future__ import annotations

import argparse
import heapq
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DynGraph, GridMap, MapParseError, resolve_map
from .mopbd import MOPBDStar, PlannerConfig
from .oracle import exhaustive_front
from .simulator import (
    PLANNERS,
    PROTOCOLS,
    SimConfig,
    Simulation,
    records_to_csv,
    run_batch,
    scatter_csv,
    summarize,
)

log = logging.getLogger("mopbdstar")

OUT_ENV = "MOPBDSTAR_OUT"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


# -- bench / run -------------------------------------------------------------


def _planners(text: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in names:
        if p not in PLANNERS:
            raise UsageError(f"unknown planner {p!r}; choose from {', '.join(PLANNERS)}")
    if not names:
        raise UsageError("--planner needs at least one name")
    return names


def _sim_config(args, grid: GridMap) -> SimConfig:
    if args.objectives < 2:
        raise UsageError("--objectives must be >= 2 for benchmarks")
    try:
        return SimConfig(
            grid,
            m=args.objectives,
            k=args.k,
            time_limit=args.time_limit,
            seed=args.seed,
            planners=_planners(args.planner),
            eps=args.eps,
            protocol=args.protocol,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def _out_dir(args) -> Path | None:
    out = args.out or os.environ.get(OUT_ENV)
    return Path(out) if out else None


def format_table(rows: list[dict]) -> str:
    cols = ("planner", "tasks", "exp", "rt", "sol", "init_exp", "init_rt", "timeouts")
    heads = ("Planner", "Tasks", "Exp.", "R.T. (s)", "Sol.", "Init Exp.", "Init R.T.", "Timeouts")

    def cell(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.4g}"
        return str(v)

    table = [heads] + [tuple(cell(r[c]) for c in cols) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in table)


def write_outputs(out: Path, records, rows: list[dict], fmt: str) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        trace = out / "trace.jsonl"
        trace.write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")
        summary = out / "summary.json"
        summary.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    else:
        trace = out / "trace.csv"
        trace.write_text(records_to_csv(records), encoding="utf-8")
        summary = out / "summary.csv"
        keys = list(rows[0]) if rows else ["planner"]
        lines = [",".join(keys)] + [
            ",".join("" if r[k] is None else str(r[k]) for k in keys) for r in rows
        ]
        summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    scatter = out / "scatter.csv"
    scatter.write_text(scatter_csv(records), encoding="utf-8")
    written += [trace, summary, scatter]
    return written


def cmd_bench(args) -> int:
    grid = resolve_map(args.map)
    config = _sim_config(args, grid)
    if args.instances < 0:
        raise UsageError("--instances must be >= 0")
    results = run_batch(config, args.instances, workers=args.workers)
    rows = summarize(results)
    print(f"map {grid.name}  M={config.m}  protocol={config.protocol}  instances={args.instances}")
    print(format_table(rows))
    aborted = [res.instance for res in results if res.aborted]
    if aborted:
        print(f"aborted instances (time limit): {aborted}")
    out = _out_dir(args)
    if out is not None:
        records = [r for res in results for r in res.records]
        for path in write_outputs(out, records, rows, args.format):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_run(args) -> int:
    grid = resolve_map(args.map)
    config = _sim_config(args, grid)
    sim = Simulation(config, args.instance)
    res = sim.run()
    print(f"map {grid.name}  u_o={res.u_o}  u_d={res.u_d}  arrived={res.arrived}")
    for r in res.records:
        ratio = "-" if r.lk_over_l0 is None else f"{r.lk_over_l0:.3f}"
        flag = "  TIMEOUT" if r.timed_out else ""
        print(
            f"task {r.task:3d}  {r.planner:10s} exp={r.expansions:<8d} "
            f"rt={r.runtime_s:.4f}s sol={r.solutions:<4d} lk/l0={ratio}  {r.event}{flag}"
        )
    out = _out_dir(args)
    if out is not None:
        for path in write_outputs(out, res.records, summarize([res]), args.format):
            print(f"wrote {path}")
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def _first_objective_only(vec, labels) -> bool:
    return any(g[0] <= vec[0] for g in labels)


def cover_holds(exact, approx, eps: float, length: int) -> bool:
    """Every exact vector has an approximate one within a factor ``(1+eps)**length``."""
    factor = (1.0 + eps) ** length
    return all(
        any(all(a <= factor * b for a, b in zip(c, star)) for c in approx) for star in exact
    )


class CheckedSimulation(Simulation):
    """Simulation that checks every planning task against the reference planners."""

    def __init__(
        self, config, instance, exhaustive: bool, corrupt: bool = False, cover_length: int | None = None
    ):
        super().__init__(config, instance)
        self.exhaustive = exhaustive
        self.cover_length = cover_length or self.grid.num_nodes
        self.failures: list[str] = []
        if corrupt:
            for p in self.planners.values():
                if isinstance(p, MOPBDStar):
                    p._covered = _first_objective_only

    def plan(self, event, changes) -> bool:
        ok = super().plan(event, changes)
        task = self.task - 1
        tested = self.config.planners[0]
        got = self.fronts.get(tested)
        exact = self.fronts.get("namoa")
        where = f"seed {self.config.seed} instance {self.instance} task {task}"
        if got is None or exact is None:
            self.failures.append(f"{where}: planner timed out")
            return False
        if self.exhaustive:
            truth = exhaustive_front(self.graph, self.u_c, self.u_d)
            if truth != exact:
                self.failures.append(f"{where}: namoa {exact} != exhaustive {truth}")
        if self.config.eps > 0:
            length = self.cover_length
            if not cover_holds(exact, got, self.config.eps, length):
                self.failures.append(
                    f"{where}: {tested} {got} does not (1+eps)^{length}-cover exact {exact}"
                )
        elif got != exact:
            self.failures.append(f"{where}: {tested} {got} != namoa {exact}")
        return ok and not self.failures


def random_grid(
    size: int, seed: int, instance: int, density: float = 0.15, exact: bool = False
) -> GridMap:
    """A small random map with at least two open cells; sides are ``size`` or one less."""
    rng = np.random.default_rng([seed, instance, 0xC0FFEE])
    low = size if exact else max(2, size - 1)
    while True:
        rows, cols = (int(x) for x in rng.integers(low, size + 1, size=2))
        cells = rng.random((rows, cols)) >= density
        if cells.sum() >= 2:
            lines = ["".join("." if ok else "@" for ok in row) for row in cells]
            return GridMap.from_rows(lines, name=f"random-{rows}x{cols}")


@dataclass
class VerifyReport:
    instances: int = 0
    tasks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify(
    instances: int,
    seed: int = 0,
    m: int = 2,
    eps: float = 0.0,
    size: int = 4,
    grid: GridMap | None = None,
    lo: int = 1,
    hi: int = 10,
    k: int = 1,
    corrupt: bool = False,
    exact_size: bool = False,
    cover_length: int | None = None,
) -> VerifyReport:
    """Check MOPBD* against NAMOA* (and exhaustive enumeration on maps up to 16 cells)."""
    tested = "mopbd-eps" if eps > 0 else "mopbd"
    report = VerifyReport()
    for i in range(instances):
        g = grid if grid is not None else random_grid(size, seed, i, exact=exact_size)
        config = SimConfig(
            g, m=m, lo=lo, hi=hi, k=k, time_limit=600.0, seed=seed,
            planners=(tested, "namoa"), eps=eps,
        )
        try:
            sim = CheckedSimulation(
                config, i, exhaustive=g.num_nodes <= 16, corrupt=corrupt, cover_length=cover_length
            )
        except ValueError:
            # no two connected cells on this map
            continue
        try:
            sim.run()
        except Exception as e:  # a crash is a verification failure too
            sim.failures.append(f"seed {seed} instance {i}: {type(e).__name__}: {e}")
        report.instances += 1
        report.tasks += sim.task
        report.failures += sim.failures
    return report


def cmd_verify(args) -> int:
    grid = resolve_map(args.map) if args.map else None
    if grid is not None and grid.num_nodes > 36:
        raise UsageError("verify needs a map of at most 36 cells (6x6)")
    if not 2 <= args.size <= 6:
        raise UsageError("--size must be between 2 and 6")
    if args.eps < 0:
        raise UsageError("--eps must be >= 0")
    report = verify(
        args.instances, seed=args.seed, m=args.objectives, eps=args.eps, size=args.size,
        grid=grid, k=args.k, corrupt=args.corrupt_dominance,
    )
    for line in report.failures:
        print(f"FAIL {line}")
    status = "PASS" if report.ok else "FAIL"
    print(f"{status}: {report.instances} instances, {report.tasks} planning tasks, {len(report.failures)} failures")
    return EXIT_OK if report.ok else EXIT_VERIFY


# -- scalarization demo --------------------------------------------------------


def three_route_graph() -> tuple[DynGraph, int, int]:
    """Routes of cost [2,6], [6,2] and [4,4] between node 0 and node 4.

    The balanced route gets the highest middle-node id, so it loses every
    scalarized tie.
    """
    g = DynGraph(5, 2)
    for mid, half in ((1, (1, 3)), (2, (3, 1)), (3, (2, 2))):
        g.add_edge(0, mid, half)
        g.add_edge(mid, 4, half)
    return g, 0, 4


def scalar_shortest_path(graph: DynGraph, src: int, dst: int, weights) -> list[int]:
    """Dijkstra on the weighted sum of objectives; ties go to the lowest node id."""
    dist = {src: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            break
        for w in graph.neighbors(u):
            c = sum(a * b for a, b in zip(weights, graph.cost(u, w)))
            if d + c < dist.get(w, float("inf")):
                dist[w] = d + c
                prev[w] = u
                heapq.heappush(heap, (d + c, w))
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def cmd_scalarization_demo() -> dict:
    graph, s, t = three_route_graph()
    planner = MOPBDStar(graph, t, s, PlannerConfig())
    exact = planner.compute_path()
    sweep = []
    for i in range(11):
        w = i / 10
        path = scalar_shortest_path(graph, s, t, (w, 1.0 - w))
        cost = tuple(sum(graph.cost(a, b)[j] for a, b in zip(path, path[1:])) for j in range(2))
        sweep.append({"w": w, "cost": list(cost)})
    found = {tuple(e["cost"]) for e in sweep}
    missed = [c for c in exact if c not in found]
    # weights where a missed vector only ties the best weighted sum
    ties = [
        e["w"]
        for e in sweep
        if any(
            e["w"] * c[0] + (1 - e["w"]) * c[1] <= min(e["w"] * x[0] + (1 - e["w"]) * x[1] for x in exact)
            for c in missed
        )
    ]
    return {
        "exact_front": [list(c) for c in exact],
        "sweep": sweep,
        "never_selected": [list(c) for c in missed],
        "ties": ties,
    }


def print_demo(report: dict) -> None:
    print(f"exact planner front: {report['exact_front']}")
    for e in report["sweep"]:
        print(f"w={e['w']:.1f}  cost={e['cost']}")
    print(f"Pareto-optimal vectors returned by no weight: {report['never_selected']}")
    if report["ties"]:
        print(f"(they only tie the best weighted sum at w={report['ties']}; ties go to the lowest node id)")


# -- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser, planner_default: str) -> None:
    p.add_argument("--map", default="empty-16-16", help="MovingAI .map file, or a bundled map name")
    p.add_argument("--planner", default=planner_default, help=f"comma-separated, from {', '.join(PLANNERS)}")
    p.add_argument("--objectives", type=int, default=2, metavar="M")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=7, help="robot moves between obstacle events")
    p.add_argument("--time-limit", type=float, default=None, metavar="SECS")
    p.add_argument("--protocol", choices=PROTOCOLS, default="ahead")
    p.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV}, else no files)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mopbdstar", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a seeded batch and print per-planner averages")
    _common(bench, "mopbd,namoa")
    bench.add_argument("--instances", type=int, default=10)
    bench.add_argument("--workers", type=int, default=1)

    run = sub.add_parser("run", help="run a single instance and print every planning task")
    _common(run, "mopbd")
    run.add_argument("--instance", type=int, default=0)

    ver = sub.add_parser("verify", help="check MOPBD* fronts against reference planners")
    ver.add_argument("--map", default=None, help="map of at most 6x6; random small maps if omitted")
    ver.add_argument("--objectives", type=int, default=2, metavar="M")
    ver.add_argument("--eps", type=float, default=0.0)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--instances", type=int, default=200)
    ver.add_argument("--size", type=int, default=4, help="side length of random maps")
    ver.add_argument("--k", type=int, default=1, help="moves between obstacle events (1 replans every move)")
    ver.add_argument("--corrupt-dominance", action="store_true", help=argparse.SUPPRESS)

    demo = sub.add_parser("scalarization-demo", help="show a Pareto point that no weighted sum finds")
    demo.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        report = cmd_scalarization_demo()
        if args.format == "json":
            print(json.dumps(report))
        else:
            print_demo(report)
        return EXIT_OK
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, MapParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
