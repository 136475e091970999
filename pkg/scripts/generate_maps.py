"""Regenerate the stand-in benchmark maps under src/mopbdstar/maps/.

empty-16-16 is identical to the public MovingAI map. The other three are
generated with fixed seeds to match the public maps' size and category.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "mopbdstar" / "maps"


def write(name: str, cells: np.ndarray) -> None:
    h, w = cells.shape
    rows = ["".join("." if ok else "@" for ok in row) for row in cells]
    text = f"type octile\nheight {h}\nwidth {w}\nmap\n" + "\n".join(rows) + "\n"
    (OUT / f"{name}.map").write_text(text, encoding="utf-8")


def empty(size: int) -> np.ndarray:
    return np.ones((size, size), dtype=bool)


def maze(size: int, corridor: int, seed: int) -> np.ndarray:
    """Depth-first maze with ``corridor``-wide passages and 1-wide walls."""
    rng = np.random.default_rng(seed)
    pitch = corridor + 1
    n = (size + 1) // pitch
    cells = np.zeros((size, size), dtype=bool)

    def carve(r0, c0, r1, c1):
        cells[max(r0, 0) : min(r1, size), max(c0, 0) : min(c1, size)] = True

    seen = np.zeros((n, n), dtype=bool)
    stack = [(0, 0)]
    seen[0, 0] = True
    carve(0, 0, corridor, corridor)
    while stack:
        r, c = stack[-1]
        nbrs = [(r + dr, c + dc) for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0))
                if 0 <= r + dr < n and 0 <= c + dc < n and not seen[r + dr, c + dc]]
        if not nbrs:
            stack.pop()
            continue
        nr, nc = nbrs[rng.integers(len(nbrs))]
        seen[nr, nc] = True
        carve(nr * pitch, nc * pitch, nr * pitch + corridor, nc * pitch + corridor)
        r0, r1 = sorted((r, nr))
        c0, c1 = sorted((c, nc))
        carve(r0 * pitch, c0 * pitch, r1 * pitch + corridor, c1 * pitch + corridor)
        stack.append((nr, nc))
    return cells


def random_map(size: int, blocked: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cells = np.ones((size, size), dtype=bool)
    idx = rng.choice(size * size, size=int(round(blocked * size * size)), replace=False)
    cells.flat[idx] = False
    return cells


def rooms(height: int, width: int, seed: int, count: int = 14) -> np.ndarray:
    """Rooms joined by L-shaped corridors, loosely game-like."""
    rng = np.random.default_rng(seed)
    cells = np.zeros((height, width), dtype=bool)
    centers = []
    for _ in range(count):
        h = int(rng.integers(5, 13))
        w = int(rng.integers(5, 15))
        r = int(rng.integers(1, height - h - 1))
        c = int(rng.integers(1, width - w - 1))
        cells[r : r + h, c : c + w] = True
        centers.append((r + h // 2, c + w // 2))
    for (r0, c0), (r1, c1) in zip(centers, centers[1:]):
        cells[min(r0, r1) : max(r0, r1) + 1, c0 : c0 + 2] = True
        cells[r1 : r1 + 2, min(c0, c1) : max(c0, c1) + 1] = True
    # scattered pillars inside rooms
    pillars = rng.random((height, width)) < 0.04
    cells &= ~pillars
    return cells


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("empty-16-16", empty(16))
    write("maze-32-32-2", maze(32, 2, seed=2))
    write("random-32-32-20", random_map(32, 0.20, seed=20))
    write("game-65-81", rooms(65, 81, seed=312))
