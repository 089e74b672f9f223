"""Interior graphs, Laplacians, directed bonds and wiring matrices."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GraphError
from .report import TOL_GROUP, SpectrumReport, group_values


@dataclass(frozen=True, eq=False)
class InteriorGraph:
    """Finite simple connected graph on vertices ``0 .. vertex_count - 1``.

    Edges are stored as sorted pairs in input order; edge ``k`` owns the
    directed bonds ``2k`` (low -> high vertex) and ``2k + 1`` (reverse).
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    connectivity: np.ndarray = field(init=False, repr=False)
    valencies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        norm = []
        seen = set()
        for k, e in enumerate(self.edges):
            i, j = (int(x) for x in e)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge {k} ({i}, {j}) references a vertex outside 0..{n - 1}")
            if i == j:
                raise GraphError(f"edge {k} is a loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"edge {k} duplicates edge {key}")
            seen.add(key)
            norm.append(key)
        c = np.zeros((n, n), dtype=np.int64)
        for i, j in norm:
            c[i, j] = c[j, i] = 1
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "connectivity", c)
        object.__setattr__(self, "valencies", c.sum(axis=1))
        self.connectivity.setflags(write=False)
        self.valencies.setflags(write=False)
        if not _is_connected(c):
            raise GraphError("graph is not connected")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def max_valency(self) -> int:
        return int(self.valencies.max()) if self.vertex_count > 1 else 0

    @cached_property
    def bonds(self) -> DirectedBondIndex:
        return DirectedBondIndex.from_edges(self.edges)

    @cached_property
    def bond_topology(self) -> BondTopology:
        b = self.bonds
        return BondTopology.build(b.origin, b.terminus, b.reverse, self.vertex_count)

    @cached_property
    def laplacian(self) -> np.ndarray:
        lap = np.diag(self.valencies).astype(float) - self.connectivity
        lap.setflags(write=False)
        return lap


def _is_connected(c) -> bool:
    n = c.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(c[i]):
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


@dataclass(frozen=True, eq=False)
class DirectedBondIndex:
    origin: np.ndarray
    terminus: np.ndarray

    @classmethod
    def from_edges(cls, edges):
        m = len(edges)
        origin = np.empty(2 * m, dtype=np.intp)
        terminus = np.empty(2 * m, dtype=np.intp)
        for k, (i, j) in enumerate(edges):
            origin[2 * k], terminus[2 * k] = i, j
            origin[2 * k + 1], terminus[2 * k + 1] = j, i
        return cls(origin, terminus)

    @property
    def bond_count(self) -> int:
        return len(self.origin)

    @property
    def reverse(self) -> np.ndarray:
        return np.arange(self.bond_count, dtype=np.intp) ^ 1


@dataclass(frozen=True, eq=False)
class BondTopology:
    """Per-vertex incoming/outgoing bond lists in CSR layout.

    Used by the evolution-operator kernels; ``reverse`` is explicit because
    bordered layouts do not pair bonds as ``d ^ 1``.
    """

    origin: np.ndarray
    terminus: np.ndarray
    reverse: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray

    @classmethod
    def build(cls, origin, terminus, reverse, vertex_count):
        origin = np.ascontiguousarray(origin, dtype=np.intp)
        terminus = np.ascontiguousarray(terminus, dtype=np.intp)
        reverse = np.ascontiguousarray(reverse, dtype=np.intp)
        if np.any(origin[reverse] != terminus) or np.any(reverse[reverse] != np.arange(len(reverse))):
            raise GraphError("reverse map inconsistent with bond endpoints")
        in_idx = np.argsort(terminus, kind="stable").astype(np.intp)
        out_idx = np.argsort(origin, kind="stable").astype(np.intp)
        in_ptr = np.zeros(vertex_count + 1, dtype=np.intp)
        out_ptr = np.zeros(vertex_count + 1, dtype=np.intp)
        np.cumsum(np.bincount(terminus, minlength=vertex_count), out=in_ptr[1:])
        np.cumsum(np.bincount(origin, minlength=vertex_count), out=out_ptr[1:])
        return cls(origin, terminus, reverse, in_ptr, in_idx, out_ptr, out_idx)

    @property
    def size(self) -> int:
        return len(self.origin)


@dataclass(frozen=True, eq=False)
class WiringMatrix:
    """0/1 matrix attaching each lead (or dangling bond) to one interior vertex."""

    matrix: np.ndarray
    mode: str = "dangling"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.int64, copy=True)
        if m.ndim != 2:
            raise GraphError("wiring matrix must be two-dimensional")
        if self.mode not in ("lead", "dangling"):
            raise GraphError(f"unknown wiring mode {self.mode!r}")
        if not np.isin(m, (0, 1)).all():
            raise GraphError("wiring entries must be 0 or 1")
        if m.shape[1] and not (m.sum(axis=0) == 1).all():
            raise GraphError("every wiring column needs exactly one nonzero entry")
        if self.mode == "lead" and (m.sum(axis=1) > 1).any():
            raise GraphError("at most one lead may attach to a vertex")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vertices(cls, vertex_count, vertices, mode="dangling"):
        vertices = list(vertices)
        m = np.zeros((vertex_count, len(vertices)), dtype=np.int64)
        for col, v in enumerate(vertices):
            if not 0 <= v < vertex_count:
                raise GraphError(f"wiring references vertex {v} outside 0..{vertex_count - 1}")
            m[v, col] = 1
        return cls(m, mode)

    @property
    def lead_count(self) -> int:
        return self.matrix.shape[1]

    @property
    def vertex_count(self) -> int:
        return self.matrix.shape[0]

    @property
    def attachments(self) -> np.ndarray:
        """Interior vertex of each column."""
        return np.argmax(self.matrix, axis=0).astype(np.intp)

    @property
    def counts(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def dtilde(self) -> np.ndarray:
        return np.diag(self.counts)

    def check_graph(self, g: InteriorGraph):
        if self.vertex_count != g.vertex_count:
            raise GraphError(
                f"wiring has {self.vertex_count} rows but graph has {g.vertex_count} vertices"
            )


def build_laplacian(g: InteriorGraph) -> np.ndarray:
    """Return ``D - C`` for the interior graph."""
    return np.array(g.laplacian)


def direct_spectrum(g: InteriorGraph, tol_group=TOL_GROUP) -> SpectrumReport:
    """Diagonalize the Laplacian densely and group eigenvalues."""
    evals = np.linalg.eigvalsh(g.laplacian)
    centers, counts, _ = group_values(evals, tol_group)
    return SpectrumReport(tuple(centers), tuple(counts), "direct", tuple(0.0 for _ in centers))


def full_wiring(g: InteriorGraph, mode="lead") -> WiringMatrix:
    return WiringMatrix(np.eye(g.vertex_count, dtype=np.int64), mode)


def attach_pendants(g: InteriorGraph, wiring: WiringMatrix) -> InteriorGraph:
    """Interior graph plus one degree-1 vertex per wiring column.

    Pendant ``l`` becomes vertex ``V + l``.
    """
    wiring.check_graph(g)
    n = g.vertex_count
    extra = [(int(v), n + l) for l, v in enumerate(wiring.attachments)]
    return InteriorGraph(n + wiring.lead_count, g.edges + tuple(extra))


def join_graphs(left: InteriorGraph, right: InteriorGraph, links) -> InteriorGraph:
    """Disjoint union of two graphs plus connecting edges ``(i_left, j_right)``."""
    n1 = left.vertex_count
    shifted = tuple((i + n1, j + n1) for i, j in right.edges)
    bridge = tuple((int(i), n1 + int(j)) for i, j in links)
    return InteriorGraph(n1 + right.vertex_count, left.edges + shifted + bridge)


def add_vertex(g: InteriorGraph, attach) -> InteriorGraph:
    """Graph with a new vertex ``V`` joined to each vertex of ``attach``."""
    n = g.vertex_count
    return InteriorGraph(n + 1, g.edges + tuple((int(j), n) for j in attach))
