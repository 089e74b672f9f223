"""Evolution-operator scattering on directed bonds.

A Laplacian eigenvector is encoded by bond amplitudes: bond ``(i, j)``
carries ``psi(x) = a_d e^{i pi x/4} + a_dhat e^{-i pi x/4}`` with ``x = 1``
at ``i`` and ``x = -1`` at ``j``, where ``d`` is the bond directed away
from ``i``.  Vertex scattering matrices map incoming to outgoing amplitudes;
the evolution operator glues them together.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels, linalg
from .errors import GraphError, NotStationary, SigmaSingular
from .graph import BondTopology, InteriorGraph, WiringMatrix
from .lead import ScatteringMatrix

STATIONARY_TOL = 1e-7
_PHASE = np.exp(1j * np.pi / 4)


def sigma_coupling(v, lam):
    return 2.0 / (v * (1.0 - 1j * (1.0 - lam / v)))


@dataclass(frozen=True, eq=False)
class VertexSigma:
    """``sigma[k, k']``: outgoing bond ``k`` from incoming bond ``k'``.

    Row and column ``k`` refer to the same undirected bond, so the diagonal
    holds back-scattering amplitudes.
    """

    degree: int
    lam: float
    entries: np.ndarray
    vertex: int | None = None


def vertex_sigma(v: int, lam, vertex=None) -> VertexSigma:
    if v < 1:
        raise ValueError("vertex degree must be >= 1")
    entries = 1j * (np.eye(v) - sigma_coupling(v, lam))
    return VertexSigma(int(v), lam, entries, vertex)


@dataclass(frozen=True, eq=False)
class EvolutionOperator:
    lam: float
    matrix: np.ndarray
    topology: BondTopology

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def evolution_operator(g: InteriorGraph, lam) -> EvolutionOperator:
    topo = g.bond_topology
    u = kernels.assemble_evolution(topo, g.valencies.astype(float), lam)
    return EvolutionOperator(lam, u, topo)


def secular_evolution(g: InteriorGraph, lam, log=False):
    u = evolution_operator(g, lam).matrix
    ld = linalg.logdet(np.eye(len(u)) - u)
    return ld if log else ld.to_complex()


def stationary_vectors(g: InteriorGraph, lam, tol=STATIONARY_TOL):
    """Orthonormal basis (columns) of the kernel of ``I - U(lam)``."""
    u = evolution_operator(g, lam).matrix
    if u.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(np.eye(len(u)) - u)
    return vh[s < tol].conj().T


def reconstruct_eigenvector(g: InteriorGraph, lam, a, tol=1e-8) -> np.ndarray:
    """Vertex values ``f_i = a_d e^{i pi/4} + a_dhat e^{-i pi/4}`` (``o(d) = i``).

    Every bond leaving ``i`` must give the same value.
    """
    a = np.asarray(a, dtype=complex)
    u = evolution_operator(g, lam).matrix
    scale = np.linalg.norm(a)
    if scale == 0 or np.linalg.norm(u @ a - a) > tol * scale:
        raise NotStationary(lam, "U a != a")
    b = g.bonds
    values = a * _PHASE + a[b.reverse] * np.conj(_PHASE)
    f = np.zeros(g.vertex_count, dtype=complex)
    for i in range(g.vertex_count):
        here = values[b.origin == i]
        if np.abs(here - here[0]).max() > tol * scale:
            raise NotStationary(lam, f"bond values disagree at vertex {i}")
        f[i] = here.mean()
    return f


@dataclass(frozen=True, eq=False)
class BorderedEvolution:
    """Blocks of the evolution operator of the graph with dangling bonds.

    Bond order: the ``2E`` interior bonds, then ``L`` incoming dangling
    bonds (pendant -> interior), then ``L`` outgoing ones.
    """

    lam: float
    sigma: np.ndarray
    omega: np.ndarray
    omega_tr: np.ndarray
    rho_in: np.ndarray
    rho_out: np.ndarray
    full: np.ndarray


class DanglingSystem:
    """Interior graph with dangling bonds described by a wiring matrix."""

    def __init__(self, g: InteriorGraph, wiring: WiringMatrix):
        wiring.check_graph(g)
        self.graph = g
        self.wiring = wiring
        n, m, L = g.vertex_count, 2 * g.edge_count, wiring.lead_count
        att = wiring.attachments
        pend = n + np.arange(L)
        b = g.bonds
        origin = np.concatenate([b.origin, pend, att])
        terminus = np.concatenate([b.terminus, att, pend])
        reverse = np.concatenate([b.reverse, m + L + np.arange(L), m + np.arange(L)])
        self.topology = BondTopology.build(origin, terminus, reverse, n + L)
        self.degree = np.concatenate([g.valencies + wiring.counts, np.ones(L)]).astype(float)
        self.interior = m
        self.size = L

    @cached_property
    def s_zero(self) -> np.ndarray:
        return s_zero(self.wiring)

    def bordered(self, lam) -> BorderedEvolution:
        u = kernels.assemble_evolution(self.topology, self.degree, lam)
        m, L = self.interior, self.size
        i, dm, dp = slice(0, m), slice(m, m + L), slice(m + L, m + 2 * L)
        return BorderedEvolution(lam, u[i, i], u[i, dm], u[dp, i], u[dp, dm], u[dm, dp], u)

    def s_matrix(self, lam) -> np.ndarray:
        blk = self.bordered(lam)
        if self.interior == 0:
            return blk.rho_in.copy()
        try:
            x = linalg.solve(np.eye(self.interior) - blk.sigma, blk.omega)
        except linalg.Singular as exc:
            raise SigmaSingular(lam, f"I - Sigma singular (rcond {exc.rcond:.2e})") from None
        return blk.rho_in + blk.omega_tr @ x

    def kernel(self, lam) -> np.ndarray:
        return self.s_matrix(lam) @ self.s_zero.conj().T

    def bordered_determinants(self, lam):
        """``(det B, det(I - Sigma))`` with ``B`` the bordered secular matrix.

        ``z_D = det B / det(I - Sigma)`` by the Schur complement, and ``B``
        never needs ``(I - Sigma)^-1``.
        """
        blk = self.bordered(lam)
        m, L = self.interior, self.size
        s0h = self.s_zero.conj().T
        big = np.zeros((m + L, m + L), dtype=complex)
        big[:m, :m] = np.eye(m) - blk.sigma
        big[:m, m:] = -blk.omega @ s0h
        big[m:, :m] = -blk.omega_tr
        big[m:, m:] = np.eye(L) - blk.rho_in @ s0h
        return linalg.logdet(big), linalg.logdet(np.eye(m) - blk.sigma)

    def z_d(self, lam, log=False, fallback_step=1e-7):
        try:
            ld = linalg.logdet(np.eye(self.size) - self.kernel(lam))
            return ld if log else ld.to_complex()
        except SigmaSingular:
            pass
        # removable point: symmetric average of the bordered ratio
        vals = []
        for h in (-fallback_step, fallback_step):
            num, den = self.bordered_determinants(lam + h)
            vals.append(num.to_complex() / den.to_complex())
        z = complex(np.mean(vals))
        return linalg.LogDet(z / abs(z) if z else 1, np.log(abs(z))) if log else z

    def extended_secular(self, lam, log=False):
        u = self.bordered(lam).full
        ld = linalg.logdet(np.eye(len(u)) - u)
        return ld if log else ld.to_complex()


def bordered_evolution(g, wiring, lam) -> BorderedEvolution:
    return DanglingSystem(g, wiring).bordered(lam)


def extended_secular(g, wiring, lam, log=False):
    return DanglingSystem(g, wiring).extended_secular(lam, log)


def s_dangling(g, wiring, lam) -> ScatteringMatrix:
    return ScatteringMatrix("dangling", lam, DanglingSystem(g, wiring).s_matrix(lam))


def s_zero(wiring: WiringMatrix) -> np.ndarray:
    """Dangling-vertex matching matrix ``S0``; block diagonal per boundary vertex."""
    if wiring.mode != "dangling":
        raise GraphError("S0 is defined for dangling-bond wiring")
    w = wiring.matrix.astype(float)
    d = wiring.counts.astype(float)
    inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
    same = w.T @ w  # 1 where two bonds share a boundary vertex
    return (1 - 1j) * (w.T @ (inv[:, None] * w)) + 1j * np.diag(np.diag(same))


def z_D(g, wiring, lam, log=False):
    return DanglingSystem(g, wiring).z_d(lam, log)
