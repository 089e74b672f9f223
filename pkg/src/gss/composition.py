"""Single-lead Green functions, two-graph composition and vertex addition."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .bond import DanglingSystem, vertex_sigma
from .errors import GraphError, PoleProximity, SigmaSingular
from .graph import InteriorGraph, WiringMatrix, add_vertex, join_graphs
from .lead import TOL_COUPLING, TOL_POLE, dispersion
from .solver import default_step, make_grid, refine_roots, scan_kernel

FALLBACK_STEP = 1e-7


def single_lead_secular(g: InteriorGraph, attach_vertex: int, w, lam) -> complex:
    """z_Ld for one lead at ``attach_vertex``, written through the Green function.

    With ``G = ((Delta - lam)^-1)[v, v]`` one has
    ``z = -(1 + xi_-) / (w G (1 - xi_-) - xi_-)``.  ``G`` is summed over the
    eigenmodes of ``Delta``; modes vanishing at ``v`` drop out, and at a
    pole that does couple ``G`` is infinite so ``z`` takes its limit 0.
    """
    n = g.vertex_count
    if not 0 <= attach_vertex < n:
        raise GraphError(f"attach vertex {attach_vertex} outside 0..{n - 1}")
    xm = dispersion(lam, w)[0]
    mu, modes = np.linalg.eigh(g.laplacian)
    weight = modes[attach_vertex] ** 2
    d = mu - lam
    near = np.abs(d) < TOL_POLE
    coupled = weight > TOL_COUPLING
    if (near & coupled).any():
        return 0j
    keep = ~near & coupled
    green = (weight[keep] / d[keep]).sum()
    return complex(-(1 + xm) / (w * green * (1 - xm) - xm))


def _symmetric_limit(fn, lam, h=FALLBACK_STEP):
    return 0.5 * (fn(lam - h) + fn(lam + h))


@dataclass(frozen=True, eq=False)
class CompositionWiring:
    """Two graphs joined by edges ``(i in left, j in right)``."""

    left: InteriorGraph
    right: InteriorGraph
    links: tuple[tuple[int, int], ...]

    def __post_init__(self):
        links = tuple((int(i), int(j)) for i, j in self.links)
        if not links:
            raise GraphError("composition needs at least one connecting edge")
        if len(set(links)) != len(links):
            raise GraphError("connecting edges must not repeat")
        for i, j in links:
            if not 0 <= i < self.left.vertex_count:
                raise GraphError(f"left vertex {i} out of range")
            if not 0 <= j < self.right.vertex_count:
                raise GraphError(f"right vertex {j} out of range")
        object.__setattr__(self, "links", links)

    @property
    def size(self) -> int:
        return len(self.links)

    @cached_property
    def composite(self) -> InteriorGraph:
        return join_graphs(self.left, self.right, self.links)

    @cached_property
    def left_system(self) -> DanglingSystem:
        w = WiringMatrix.from_vertices(self.left.vertex_count, [i for i, _ in self.links])
        return DanglingSystem(self.left, w)

    @cached_property
    def right_system(self) -> DanglingSystem:
        w = WiringMatrix.from_vertices(self.right.vertex_count, [j for _, j in self.links])
        return DanglingSystem(self.right, w)

    def kernel(self, lam) -> np.ndarray:
        return self.left_system.s_matrix(lam) @ self.right_system.s_matrix(lam)


def _secular(kernel, lam):
    def direct(x):
        k = kernel(x)
        return linalg.det(np.eye(len(k)) - k)
    try:
        return direct(lam)
    except SigmaSingular:
        return _symmetric_limit(direct, lam)


def compose_secular(cw: CompositionWiring, lam) -> complex:
    """``det(I - S1 S2)``; zeros lie in the spectrum of the composite graph."""
    return _secular(cw.kernel, lam)


class VertexAddition:
    """Graph ``g`` with a new vertex joined to the vertices in ``attach``."""

    def __init__(self, g: InteriorGraph, attach):
        attach = [int(j) for j in attach]
        if not attach:
            raise GraphError("new vertex needs at least one neighbour")
        if len(set(attach)) != len(attach):
            raise GraphError("attachment list must not repeat vertices")
        self.graph = g
        self.attach = attach
        self.wiring = WiringMatrix.from_vertices(g.vertex_count, attach)
        self.system = DanglingSystem(g, self.wiring)
        self.shifted = g.laplacian + np.diag(self.wiring.counts).astype(float)
        self.poles, modes = np.linalg.eigh(self.shifted)
        # weight of each mode on the attachment vector W 1
        self.weights = (modes.T @ self.wiring.counts.astype(float)) ** 2
        self.coupled = self.weights > TOL_COUPLING

    @property
    def degree(self) -> int:
        return len(self.attach)

    @cached_property
    def enlarged(self) -> InteriorGraph:
        return add_vertex(self.graph, self.attach)

    def kernel(self, lam) -> np.ndarray:
        return self.system.s_matrix(lam) @ vertex_sigma(self.degree, lam).entries

    def secular(self, lam) -> complex:
        return _secular(self.kernel, lam)

    def resolvent_residual(self, lam) -> float:
        """``lam - v_m + sum_{j,k in attach} R_jk`` with ``R = (Delta + Dtilde - lam)^-1``.

        Evaluated from the eigenmodes of ``Delta + Dtilde``; poles whose
        modes are orthogonal to the attachment vector cancel and are skipped.
        """
        d = self.poles - lam
        near = np.abs(d) < TOL_POLE
        if (near & self.coupled).any():
            raise PoleProximity(lam, float(self.poles[np.flatnonzero(near & self.coupled)[0]]))
        keep = ~near & self.coupled
        return float(lam - self.degree + (self.weights[keep] / d[keep]).sum())

    def defined_at(self, lam, tol=1e-6) -> bool:
        """False within ``tol`` of any eigenvalue of Delta + Dtilde, where R itself does not exist."""
        return bool(np.abs(self.poles - lam).min() > tol)

    def resolvent_zeros(self, window, pole_gap=1e-7):
        """All zeros of the resolvent residual in ``window``.

        Between consecutive coupled poles the residual increases strictly
        (its derivative is ``1 + sum_k w_k / (mu_k - lam)^2``), so each
        interval holds at most one zero.
        """
        lo, hi = window
        cuts = [lo] + [p for p in self.poles[self.coupled] if lo < p < hi] + [hi]
        zeros = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            a = a + pole_gap * max(1.0, abs(a)) if a != lo else a
            b = b - pole_gap * max(1.0, abs(b)) if b != hi else b
            if b <= a:
                continue
            fa, fb = self._safe(a), self._safe(b)
            if fa is None or fb is None or fa * fb > 0:
                continue
            zeros.append(brentq(self.resolvent_residual, a, b, xtol=1e-14, rtol=1e-15))
        return zeros

    def _safe(self, lam):
        try:
            return self.resolvent_residual(lam)
        except PoleProximity:
            return None


def add_vertex_secular(g, attach_list, lam) -> complex:
    return VertexAddition(g, attach_list).secular(lam)


def add_vertex_resolvent(g, attach_list, lam) -> float:
    return VertexAddition(g, attach_list).resolvent_residual(lam)


def _window(graph: InteriorGraph, window):
    return window or (-0.25, 2.0 * graph.max_valency + 1)


def compose_spectrum(cw: CompositionWiring, window=None, step=None, tol=1e-10, threads=1):
    window = _window(cw.composite, window)
    step = step or default_step(window, cw.composite.vertex_count)
    s = scan_kernel(cw.kernel, make_grid(window, step), "compose", threads)
    return refine_roots(s, tol)


def add_vertex_spectrum(g, attach_list, window=None, step=None, tol=1e-10, threads=1):
    va = VertexAddition(g, attach_list)
    window = _window(va.enlarged, window)
    step = step or default_step(window, va.enlarged.vertex_count)
    s = scan_kernel(va.kernel, make_grid(window, step), "add_vertex", threads)
    return refine_roots(s, tol)
