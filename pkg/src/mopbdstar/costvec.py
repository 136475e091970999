"""Cost vectors, dominance relations and non-dominated filtering.

A cost vector is a plain tuple of non-negative numbers. Integers are used
wherever possible; ``INF`` (``math.inf``) marks a non-traversable edge and
saturates under addition.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

INF = math.inf

CostVec = tuple  # tuple[int | float, ...]

# Relative slack used by eps_dominates when eps > 0.
REL_TOL = 1e-12


def _check_dims(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def costvec(values: Iterable) -> CostVec:
    """Validate and freeze ``values`` into a cost vector."""
    vec = tuple(values)
    if not vec:
        raise ValueError("cost vector needs at least one component")
    for v in vec:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TypeError(f"cost component must be a number, got {v!r}")
        if math.isnan(v) or v < 0:
            raise ValueError(f"cost component must be >= 0, got {v!r}")
    return vec


def zeros(m: int) -> CostVec:
    return (0,) * m


def infs(m: int) -> CostVec:
    return (INF,) * m


def is_finite(a: Sequence) -> bool:
    return all(x != INF for x in a)


def add(a: Sequence, b: Sequence) -> CostVec:
    _check_dims(a, b)
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> CostVec:
    """Componentwise difference; only meaningful for finite vectors."""
    _check_dims(a, b)
    return tuple(x - y for x, y in zip(a, b))


def dominates(a: Sequence, b: Sequence) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    _check_dims(a, b)
    strict = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def weakly_dominates(a: Sequence, b: Sequence) -> bool:
    """Componentwise ``a <= b`` (equal vectors weakly dominate each other)."""
    _check_dims(a, b)
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def eps_dominates(a: Sequence, b: Sequence, eps: float) -> bool:
    """True iff ``a(m) <= (1 + eps) * b(m)`` for every component.

    With ``eps == 0`` this is exactly :func:`weakly_dominates`. For positive
    ``eps`` the scaled bound gets a relative slack of ``REL_TOL`` so that
    values like ``101 <= 1.01 * 100`` are not lost to rounding.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    _check_dims(a, b)
    if eps == 0:
        return weakly_dominates(a, b)
    scale = 1.0 + eps
    for x, y in zip(a, b):
        if x <= y:
            continue
        if x == INF:
            return False
        if x > scale * y * (1.0 + REL_TOL):
            return False
    return True


def lex_less(a: Sequence, b: Sequence) -> bool:
    _check_dims(a, b)
    return tuple(a) < tuple(b)


def covered(vec: Sequence, others: Iterable[Sequence], eps: float = 0.0) -> bool:
    """True iff some member of ``others`` weakly (or eps-) dominates ``vec``."""
    if eps:
        return any(eps_dominates(o, vec, eps) for o in others)
    return any(weakly_dominates(o, vec) for o in others)


def nd_filter_naive(vectors: Iterable[Sequence]) -> list[CostVec]:
    """Non-dominated subset by pairwise comparison, one copy per value.

    Works for any M. Only a lexicographically smaller vector can dominate,
    and dominance is transitive, so each vector is compared against the
    survivors that precede it in lex order. Output order follows first
    occurrence in the input.
    """
    unique: list[CostVec] = []
    seen: set = set()
    for v in vectors:
        t = tuple(v)
        if t not in seen:
            seen.add(t)
            unique.append(t)
    if unique:
        m = len(unique[0])
        for t in unique:
            if len(t) != m:
                raise ValueError("vectors must share one dimension")
    kept: list[CostVec] = []
    for a in sorted(unique):
        for b in kept:
            for x, y in zip(b, a):
                if x > y:
                    break
            else:
                break
        else:
            kept.append(a)
    keep = set(kept)
    return [a for a in unique if a in keep]


def nd_filter_kung_2d(vectors: Iterable[Sequence]) -> list[CostVec]:
    """Bi-objective non-dominated subset via sort and a single sweep.

    Sorted by first then second component; a vector survives only if its
    second component is strictly below every second component seen so far.
    Returned in that sorted order.
    """
    items = [tuple(v) for v in vectors]
    for t in items:
        if len(t) != 2:
            raise ValueError(f"kung_2d needs M == 2, got M == {len(t)}")
    items.sort()
    out: list[CostVec] = []
    for t in items:
        # >= also drops exact duplicates and first-component ties
        if out and t[1] >= out[-1][1]:
            continue
        out.append(t)
    return out


def nd_filter(vectors: Iterable[Sequence], kernel: str = "naive") -> list[CostVec]:
    """Dispatch to the requested ND kernel; ``kung`` falls back to naive for M != 2."""
    if kernel == "naive":
        return nd_filter_naive(vectors)
    if kernel == "kung":
        items = [tuple(v) for v in vectors]
        if items and len(items[0]) == 2:
            return nd_filter_kung_2d(items)
        return nd_filter_naive(items)
    raise ValueError(f"unknown ND kernel {kernel!r}")
