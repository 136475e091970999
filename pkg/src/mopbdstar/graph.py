"""Dynamic undirected graphs with vector edge costs, built from grid maps."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .costvec import INF, CostVec, costvec, infs, is_finite

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OTW")


class MapParseError(ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    passable: tuple[bool, ...]
    name: str = ""

    def node(self, row: int, col: int) -> int:
        return row * self.width + col

    def coords(self, node: int) -> tuple[int, int]:
        return divmod(node, self.width)

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def is_passable(self, node: int) -> bool:
        return self.passable[node]

    @property
    def num_nodes(self) -> int:
        return self.width * self.height

    def passable_nodes(self) -> list[int]:
        return [u for u, ok in enumerate(self.passable) if ok]

    def edges(self) -> list[tuple[int, int]]:
        """4-connected edges between passable cells, as sorted ``(u, w)`` pairs."""
        out = []
        for r in range(self.height):
            for c in range(self.width):
                u = self.node(r, c)
                if not self.passable[u]:
                    continue
                if c + 1 < self.width and self.passable[u + 1]:
                    out.append((u, u + 1))
                if r + 1 < self.height and self.passable[u + self.width]:
                    out.append((u, u + self.width))
        return out

    @classmethod
    def from_rows(cls, rows: list[str], name: str = "") -> "GridMap":
        text = f"type octile\nheight {len(rows)}\nwidth {len(rows[0]) if rows else 0}\nmap\n"
        return load_movingai(text + "\n".join(rows) + "\n", name=name)

    def to_movingai(self) -> str:
        lines = ["type octile", f"height {self.height}", f"width {self.width}", "map"]
        for r in range(self.height):
            row = self.passable[r * self.width : (r + 1) * self.width]
            lines.append("".join("." if ok else "@" for ok in row))
        return "\n".join(lines) + "\n"


def load_movingai(text: str, name: str = "") -> GridMap:
    """Parse a MovingAI ``.map`` file body."""
    lines = text.splitlines()
    header: dict[str, str] = {}
    i = 0
    for key in ("type", "height", "width"):
        if i >= len(lines):
            raise MapParseError(f"missing '{key}' header", i + 1)
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != key:
            raise MapParseError(f"expected '{key} <value>', got {lines[i]!r}", i + 1)
        header[key] = parts[1]
        i += 1
    if i >= len(lines) or lines[i].strip() != "map":
        raise MapParseError("expected 'map' line", i + 1)
    i += 1
    try:
        height = int(header["height"])
        width = int(header["width"])
    except ValueError as exc:
        raise MapParseError(f"bad dimension: {exc}", 2) from None
    if height < 1 or width < 1:
        raise MapParseError("dimensions must be positive", 2)

    cells: list[bool] = []
    for r in range(height):
        lineno = i + r + 1
        if i + r >= len(lines):
            raise MapParseError(f"expected {height} rows, got {r}", lineno)
        row = lines[i + r].rstrip("\r\n")
        if len(row) != width:
            raise MapParseError(f"row has {len(row)} cells, expected {width}", lineno)
        for c, ch in enumerate(row):
            if ch in PASSABLE:
                cells.append(True)
            elif ch in BLOCKED:
                cells.append(False)
            else:
                raise MapParseError(f"unknown glyph {ch!r} at column {c}", lineno)
    for j in range(i + height, len(lines)):
        if lines[j].strip():
            raise MapParseError("trailing content after map body", j + 1)
    return GridMap(width, height, tuple(cells), name)


def read_map(path: str | Path) -> GridMap:
    path = Path(path)
    return load_movingai(path.read_text(encoding="utf-8"), name=path.stem)


MAP_DIR = Path(__file__).resolve().parent / "maps"
BUNDLED_MAPS = ("empty-16-16", "maze-32-32-2", "random-32-32-20", "game-65-81")


def bundled_map(name: str) -> GridMap:
    """Load one of the maps shipped with the package, by stem."""
    if name not in BUNDLED_MAPS:
        raise FileNotFoundError(f"no bundled map {name!r}; choose from {', '.join(BUNDLED_MAPS)}")
    return read_map(MAP_DIR / f"{name}.map")


def resolve_map(name_or_path: str | Path) -> GridMap:
    """A file path, or the stem of a bundled map."""
    if str(name_or_path) in BUNDLED_MAPS and not Path(name_or_path).exists():
        return bundled_map(str(name_or_path))
    return read_map(name_or_path)


@dataclass(frozen=True)
class EdgeChange:
    u: int
    w: int
    old: CostVec
    new: CostVec


def _key(u: int, w: int) -> tuple[int, int]:
    return (u, w) if u < w else (w, u)


class DynGraph:
    """Undirected graph; each edge stores one cost vector shared by both directions."""

    def __init__(self, num_nodes: int, m: int, grid: GridMap | None = None):
        if m < 1:
            raise ValueError("M must be >= 1")
        self.num_nodes = num_nodes
        self.m = m
        self.grid = grid
        self._adj: list[list[int]] = [[] for _ in range(num_nodes)]
        self._cost: dict[tuple[int, int], CostVec] = {}

    def add_edge(self, u: int, w: int, cost) -> None:
        if u == w:
            raise ValueError("self loops are not allowed")
        vec = costvec(cost)
        if len(vec) != self.m:
            raise ValueError(f"edge cost has {len(vec)} components, expected {self.m}")
        k = _key(u, w)
        if k in self._cost:
            raise ValueError(f"duplicate edge {k}")
        self._cost[k] = vec
        self._adj[u].append(w)
        self._adj[w].append(u)
        self._adj[u].sort()
        self._adj[w].sort()

    def neighbors(self, u: int) -> list[int]:
        return self._adj[u]

    def has_edge(self, u: int, w: int) -> bool:
        return _key(u, w) in self._cost

    def cost(self, u: int, w: int) -> CostVec:
        try:
            return self._cost[_key(u, w)]
        except KeyError:
            raise KeyError(f"({u}, {w}) is not an edge") from None

    def edges(self) -> list[tuple[int, int, CostVec]]:
        return [(u, w, c) for (u, w), c in sorted(self._cost.items())]

    @property
    def num_edges(self) -> int:
        return len(self._cost)

    def set_cost(self, u: int, w: int, cost) -> EdgeChange | None:
        """Mutate an edge; returns ``None`` when the cost is unchanged."""
        k = _key(u, w)
        if k not in self._cost:
            raise KeyError(f"({u}, {w}) is not an edge")
        vec = costvec(cost)
        if len(vec) != self.m:
            raise ValueError(f"edge cost has {len(vec)} components, expected {self.m}")
        old = self._cost[k]
        if old == vec:
            return None
        self._cost[k] = vec
        return EdgeChange(k[0], k[1], old, vec)

    def copy(self) -> "DynGraph":
        g = DynGraph(self.num_nodes, self.m, self.grid)
        g._adj = [list(a) for a in self._adj]
        g._cost = dict(self._cost)
        return g

    def to_json(self) -> str:
        def enc(vec):
            return ["inf" if x == INF else x for x in vec]

        return json.dumps(
            {
                "M": self.m,
                "nodes": self.num_nodes,
                "edges": [{"u": u, "w": w, "cost": enc(c)} for u, w, c in self.edges()],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DynGraph":
        data = json.loads(text)
        g = cls(data["nodes"], data["M"])
        for e in data["edges"]:
            g.add_edge(e["u"], e["w"], [INF if x == "inf" else x for x in e["cost"]])
        return g


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; every random draw in the package goes through one of these."""
    return np.random.Generator(np.random.PCG64(seed))


def _draw(rng: np.random.Generator, count: int, m: int, lo: int, hi: int) -> list[CostVec]:
    arr = rng.integers(lo, hi + 1, size=(count, m))
    return [tuple(int(x) for x in row) for row in arr]


def assign_random_costs(grid: GridMap, m: int, lo: int, hi: int, seed: int) -> DynGraph:
    """One uniform integer vector in ``[lo, hi]^m`` per undirected grid edge."""
    if m < 1:
        raise ValueError("M must be >= 1")
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    edges = grid.edges()
    costs = _draw(make_rng(seed), len(edges), m, lo, hi)
    g = DynGraph(grid.num_nodes, m, grid)
    for (u, w), c in zip(edges, costs):
        g.add_edge(u, w, c)
    return g


def add_obstacle(g: DynGraph, node: int) -> list[EdgeChange]:
    """Make every edge incident on ``node`` infinite; unchanged edges are skipped."""
    if not 0 <= node < g.num_nodes:
        raise IndexError(f"node {node} out of range")
    blocked = infs(g.m)
    changes = []
    for w in g.neighbors(node):
        ch = g.set_cost(node, w, blocked)
        if ch is not None:
            changes.append(ch)
    return changes


def remove_obstacle(
    g: DynGraph, node: int, lo: int, hi: int, rng: np.random.Generator
) -> list[EdgeChange]:
    """Give every edge incident on ``node`` a fresh random finite vector."""
    if not 0 <= node < g.num_nodes:
        raise IndexError(f"node {node} out of range")
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got lo={lo}, hi={hi}")
    nbrs = g.neighbors(node)
    changes = []
    for w, c in zip(nbrs, _draw(rng, len(nbrs), g.m, lo, hi)):
        ch = g.set_cost(node, w, c)
        if ch is not None:
            changes.append(ch)
    return changes


def manhattan_heuristic(u: tuple[int, int], target: tuple[int, int], m: int) -> CostVec:
    d = abs(u[0] - target[0]) + abs(u[1] - target[1])
    return (d,) * m


class GridHeuristic:
    """Manhattan distance to a target node, repeated over all objectives.

    Admissible whenever every finite edge component is >= 1.
    """

    def __init__(self, grid: GridMap, m: int):
        self.grid = grid
        self.m = m

    def __call__(self, u: int, target: int) -> CostVec:
        w = self.grid.width
        d = abs(u // w - target // w) + abs(u % w - target % w)
        return (d,) * self.m


def zero_heuristic(m: int):
    z = (0,) * m
    return lambda u, target: z


def path_cost(g: DynGraph, path: list[int]) -> CostVec:
    total = (0,) * g.m
    for a, b in zip(path, path[1:]):
        c = g.cost(a, b)
        total = tuple(x + y for x, y in zip(total, c))
    return total


def path_is_open(g: DynGraph, path: list[int]) -> bool:
    return all(is_finite(g.cost(a, b)) for a, b in zip(path, path[1:]))
