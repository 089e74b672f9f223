"""Scattering into semi-infinite leads with ``w`` parallel bonds per step.

The interior graph is turned into a scattering graph by attaching leads
whose Laplacian has the conduction band ``[0, 4w]``.  Everything here is
expressed through the reduced resolvent ``A(lam) = w W^T R(lam) W`` with
``R(lam) = (Delta + w Dtilde - lam)^-1``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DtnSingular, GraphError, PoleProximity, ResonancePole
from .graph import InteriorGraph, WiringMatrix

TOL_POLE = 1e-9
# squared weight on the wired vertices below which a resolvent pole is removable in A
TOL_COUPLING = 1e-16


def default_w(g: InteriorGraph) -> int:
    return 2 * g.max_valency + 1


def dispersion(lam, w):
    """Return ``(xi_minus, xi_plus)`` for the lead dispersion relation.

    Both solve ``xi + 1/xi = 2 - lam/w``.  For real ``lam`` the printed
    closed form ``1 - lam/2w -+ sqrt((1 - lam/2w)^2 - 1)`` (principal root)
    fixes the labels, so ``xi_minus = exp(-i alpha)`` in the band and
    ``|xi_minus| > 1`` beyond ``4w``.  For non-real ``lam`` the band values
    are continued analytically into both half planes; the cuts then lie on
    the real axis outside the band.  The small-modulus root is always formed
    as the reciprocal of the large one, so ``xi_minus * xi_plus == 1`` up to
    rounding even far outside the band.
    """
    if w < 1:
        raise ValueError("w must be >= 1")
    lam = complex(lam)
    c = 1 - lam / (2 * w)
    if lam.imag == 0:
        # real arithmetic: a signed zero in c*c - 1 would flip the principal root
        cr = c.real
        s = math.sqrt(cr * cr - 1) if abs(cr) >= 1 else 1j * math.sqrt(1 - cr * cr)
        minus, plus = cr - s, cr + s
    else:
        s = cmath.sqrt(1 - c * c)
        minus, plus = c - 1j * s, c + 1j * s
    if abs(minus) >= abs(plus):
        return minus, (1 / minus if minus != 0 else plus)
    return 1 / plus, plus


def lead_reflection(lam, w) -> complex:
    """Phase ``s_l = -(1 - xi_+)/(1 - xi_-) = xi_+`` gained at the lead end."""
    return dispersion(lam, w)[1]


def _at_band_edge(lam, w) -> bool:
    return lam == 0 or lam == 4 * w


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    kind: str
    lam: complex
    entries: np.ndarray
    w: int | None = None

    @property
    def size(self) -> int:
        return self.entries.shape[0]


class LeadSystem:
    """Interior graph with leads attached; caches the lambda-independent parts."""

    def __init__(self, g: InteriorGraph, wiring: WiringMatrix, w: int):
        wiring.check_graph(g)
        if (wiring.counts > 1).any():
            raise GraphError("lead wiring allows at most one lead per vertex")
        if int(w) != w or w < 1:
            raise ValueError("w must be a positive integer")
        self.graph = g
        self.wiring = wiring
        self.w = int(w)
        self.W = wiring.matrix.astype(float)
        self.shifted = g.laplacian + self.w * np.diag(wiring.counts).astype(float)
        self.poles, modes = np.linalg.eigh(self.shifted)
        self.coupling = self.W.T @ modes  # L x V, column k is W^T phi_k
        self.weights = (self.coupling ** 2).sum(axis=0)

    @property
    def size(self) -> int:
        return self.wiring.lead_count

    def resolvent(self, lam):
        near = np.abs(self.poles - lam)
        k = int(np.argmin(near))
        if near[k] < TOL_POLE:
            raise PoleProximity(lam, float(self.poles[k]))
        m = self.shifted - lam * np.eye(self.graph.vertex_count)
        try:
            return linalg.solve(m, np.eye(self.graph.vertex_count))
        except linalg.Singular:
            raise PoleProximity(lam, float(self.poles[k])) from None

    def _modal_denominators(self, lam):
        """``1/(mu_k - lam)`` with removable poles (modes invisible to the leads) zeroed."""
        d = self.poles - lam
        near = np.abs(d) < TOL_POLE
        if near.any():
            hit = near & (self.weights > TOL_COUPLING)
            if hit.any():
                raise PoleProximity(lam, float(self.poles[np.flatnonzero(hit)[0]]))
            d = np.where(near, np.inf, d)
        return 1.0 / d

    def reduced(self, lam):
        """``A(lam) = w W^T R(lam) W``, assembled from the eigenmodes of Delta + w Dtilde.

        Poles of ``R`` whose eigenvectors vanish on every wired vertex cancel
        in ``A``; the modal form drops them so ``A`` stays finite there.
        """
        inv = self._modal_denominators(lam)
        return self.w * (self.coupling * inv) @ self.coupling.T

    def s_matrix(self, lam) -> np.ndarray:
        n = self.size
        if _at_band_edge(lam, self.w):
            return -np.eye(n, dtype=complex)
        xm, xp = dispersion(lam, self.w)
        a = self.reduced(lam)
        eye = np.eye(n)
        try:
            return -linalg.solve(a - xm * eye, a - xp * eye)
        except linalg.Singular as exc:
            raise ResonancePole(lam, f"w W^T R W - xi_- I singular (rcond {exc.rcond:.2e})") from None

    def kernel(self, lam) -> np.ndarray:
        """Unitary secular kernel ``xi_- S(lam)``."""
        return dispersion(lam, self.w)[0] * self.s_matrix(lam)

    def z_r(self, lam, log=False):
        ld = linalg.logdet(self.reduced(lam) - np.eye(self.size))
        return ld if log else ld.to_complex()

    def z_ld(self, lam, log=False):
        ld = linalg.logdet(np.eye(self.size) - self.kernel(lam))
        return ld if log else ld.to_complex()

    def z_res(self, lam, log=False):
        xm = dispersion(lam, self.w)[0]
        ld = linalg.logdet(self.reduced(lam) - xm * np.eye(self.size))
        return ld if log else ld.to_complex()

    def z_res_numerator(self, lam) -> complex:
        """``det(A - xi_+ I)``; vanishes together with z_res at removable points."""
        xp = dispersion(lam, self.w)[1]
        return linalg.det(self.reduced(lam) - xp * np.eye(self.size))

    def z_res_logderivative(self, lam) -> complex:
        """``d/dlam log z_res`` from ``tr(M^-1 M')`` with ``M = A - xi_- I``."""
        inv = self._modal_denominators(lam)
        a = self.w * (self.coupling * inv) @ self.coupling.T
        da = self.w * (self.coupling * inv ** 2) @ self.coupling.T
        xm = dispersion(lam, self.w)[0]
        dxm = -xm * xm / (self.w * (xm * xm - 1))
        m = a - xm * np.eye(self.size)
        dm = da - dxm * np.eye(self.size)
        return complex(np.trace(linalg.solve(m, dm, rcond_min=0.0)))


def resolvent(g, wiring, w, lam):
    return LeadSystem(g, wiring, w).resolvent(lam)


def s_lead(g, wiring, w, lam) -> ScatteringMatrix:
    return ScatteringMatrix("lead", lam, LeadSystem(g, wiring, w).s_matrix(lam), int(w))


def z_R(g, wiring, w, lam, log=False):
    return LeadSystem(g, wiring, w).z_r(lam, log)


def z_Ld(g, wiring, w, lam, log=False):
    return LeadSystem(g, wiring, w).z_ld(lam, log)


def z_res(g, wiring, w, lam, log=False):
    return LeadSystem(g, wiring, w).z_res(lam, log)


def verify_scattering_solution(g, wiring, w, lam, a, depth=5, b=None) -> float:
    """Max residual of ``(Delta - lam) f = 0`` on the scattering graph.

    ``b`` defaults to ``S a``; passing another ``b`` gives a negative control.
    Interior values are ``f_V = w R W (a + b)`` and lead site ``n`` carries
    ``a xi_-^(n-1) + b xi_+^(n-1)``; sites ``1 .. depth`` are checked.
    """
    sysm = LeadSystem(g, wiring, w)
    a = np.asarray(a, dtype=complex)
    if b is None:
        b = sysm.s_matrix(lam) @ a
    b = np.asarray(b, dtype=complex)
    xm, xp = dispersion(lam, sysm.w)
    n = np.arange(depth + 1)
    lead = np.outer(xm ** n, a) + np.outer(xp ** n, b)  # row n-1 is site n
    f_v = sysm.w * sysm.resolvent(lam) @ sysm.W @ lead[0]
    lap = g.laplacian
    wv = sysm.w
    res_v = lap @ f_v + wv * sysm.wiring.counts * f_v - wv * sysm.W @ lead[0] - lam * f_v
    res_1 = -wv * sysm.W.T @ f_v - wv * lead[1] + (2 * wv - lam) * lead[0]
    worst = max(np.abs(res_v).max(initial=0.0), np.abs(res_1).max(initial=0.0))
    for k in range(1, depth):
        res_n = -wv * (lead[k + 1] + lead[k - 1]) + (2 * wv - lam) * lead[k]
        worst = max(worst, np.abs(res_n).max(initial=0.0))
    return float(worst)


def dtn_map(g: InteriorGraph, lam) -> np.ndarray:
    """Discrete Dirichlet-to-Neumann map ``M = 2 (I + R)^-1 (I - R)``.

    Uses one auxiliary vertex per interior vertex with ``w = 1``, so
    ``R = (Delta + I - lam)^-1``.
    """
    n = g.vertex_count
    eye = np.eye(n)
    try:
        r = linalg.solve(g.laplacian + (1 - lam) * eye, eye)
    except linalg.Singular:
        raise DtnSingular(lam, "Delta + I - lam I is singular") from None
    try:
        return 2 * linalg.solve(eye + r, eye - r)
    except linalg.Singular as exc:
        raise DtnSingular(lam, f"I + R singular (rcond {exc.rcond:.2e})") from None


@dataclass(frozen=True)
class Resonance:
    lam: complex
    abs_z: float
    iterations: int


def find_resonances(system: LeadSystem, re_range, im_range, n_re=24, n_im=12,
                    tol=1e-10, max_iter=60):
    """Newton-refine zeros of z_res seeded from a coarse complex grid.

    Returns ``(resonances, dropped)``: accepted resonances ordered by
    (Re, Im) and the number of seeds that failed to converge.  Zeros that
    are removable (the numerator ``det(A - xi_+ I)`` vanishes as well, as at
    ``lam = 0``) are discarded because ``S`` has no pole there.
    """
    found: list[Resonance] = []
    dropped = 0
    res = np.linspace(*re_range, n_re)
    ims = np.linspace(*im_range, n_im)
    for x in res:
        for y in ims:
            lam = complex(x, y)
            if y == 0:
                lam += 1e-3j * max(1.0, abs(x))
            out = _newton(system, lam, tol, max_iter)
            if out is None:
                dropped += 1
                continue
            lam_star, iters = out
            try:
                abs_z = abs(system.z_res(lam_star))
                numer = abs(system.z_res_numerator(lam_star))
            except (ArithmeticError, OverflowError):
                dropped += 1
                continue
            if abs_z >= tol:
                dropped += 1
                continue
            if numer < max(1e3 * tol, 1e-7):
                continue
            if any(abs(r.lam - lam_star) < 10 * tol * max(1.0, abs(lam_star)) for r in found):
                continue
            found.append(Resonance(lam_star, abs_z, iters))
    found.sort(key=lambda r: (r.lam.real, r.lam.imag))
    return found, dropped


def _newton(system, lam, tol, max_iter):
    for it in range(1, max_iter + 1):
        try:
            dlog = system.z_res_logderivative(lam)
        except (ArithmeticError, np.linalg.LinAlgError, ZeroDivisionError):
            return None
        if not np.isfinite(dlog) or dlog == 0:
            return None
        step = 1 / dlog
        lam = lam - step
        if not np.isfinite(lam):
            return None
        if abs(step) < tol * max(1.0, abs(lam)):
            return lam, it
    return None
