"""Small graph families used as fixtures and in the standard test suite."""
from __future__ import annotations

import itertools

import numpy as np

from .graph import InteriorGraph


def path(n: int) -> InteriorGraph:
    return InteriorGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> InteriorGraph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return InteriorGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> InteriorGraph:
    return InteriorGraph(n, tuple(itertools.combinations(range(n), 2)))


def star(leaves: int) -> InteriorGraph:
    return InteriorGraph(leaves + 1, tuple((0, k) for k in range(1, leaves + 1)))


def random_connected(n: int, rng: np.random.Generator, p: float = 0.3) -> InteriorGraph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        parent = order[rng.integers(k)]
        edges.add(tuple(sorted((int(order[k]), int(parent)))))
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) not in edges and rng.random() < p:
            edges.add((i, j))
    return InteriorGraph(n, tuple(sorted(edges)))


def random_suite(count=20, max_vertices=12, seed=20240917):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(3, max_vertices + 1))
        out.append((f"random{k:02d}_v{n}", random_connected(n, rng)))
    return out


def standard_suite(seed=20240917):
    """P2..P6, C3..C6, K3..K5, the 4-leaf star and 20 random graphs."""
    named = [(f"P{n}", path(n)) for n in range(2, 7)]
    named += [(f"C{n}", cycle(n)) for n in range(3, 7)]
    named += [(f"K{n}", complete(n)) for n in range(3, 6)]
    named += [("S4", star(4))]
    named += random_suite(seed=seed)
    return named
