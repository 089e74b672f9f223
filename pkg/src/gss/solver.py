"""Spectra from secular functions by eigenphase tracking.

Every secular kernel ``K(lam)`` used here is unitary on the real axis, and
``lam`` is a zero of ``det(I - K)`` exactly when an eigenphase of ``K``
passes through 0.  A scan diagonalizes ``K`` on a grid, follows each
eigenphase by eigenvector overlap, and bisects every sign change.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.linalg as sla

from . import kernels, linalg
from .bond import DanglingSystem, evolution_operator
from .errors import NumericalError
from .graph import InteriorGraph, WiringMatrix, direct_spectrum, full_wiring
from .lead import LeadSystem, default_w
from .report import TOL_GROUP, Mismatch, SpectrumReport, group_values

METHODS = ("direct", "lead", "dangling", "evolution")
ZERO_GUARD = 1e-12
NUDGE = 1e-10
AMBIGUITY_GAP = 0.1
MAX_SPLIT = 6
KERNEL_TOL = 1e-7
HALF_PI = math.pi / 2


@dataclass(frozen=True, eq=False)
class _Point:
    lam: float
    det: complex
    phases: np.ndarray
    vectors: np.ndarray


def _evaluate(kernel, lam) -> _Point:
    k = np.asarray(kernel(lam), dtype=complex)
    n = k.shape[0]
    if n == 0:
        return _Point(lam, 1 + 0j, np.zeros(0), np.zeros((0, 0), complex))
    t, z = sla.schur(k, output="complex", check_finite=False)
    phases = np.angle(np.diag(t))
    try:
        det = linalg.logdet(np.eye(n) - k).to_complex()
    except OverflowError:
        det = complex("nan")
    return _Point(lam, det, phases, z)


def _evaluate_near(kernel, lam, width):
    """Evaluate at ``lam`` or, if the kernel is undefined there, slightly off it."""
    for shift in (0.0, 0.1, -0.1, 0.2, -0.2):
        try:
            return _evaluate(kernel, lam + shift * width)
        except (NumericalError, np.linalg.LinAlgError, OverflowError):
            continue
    return None


def _eval_point(kernel, lam):
    try:
        p = _evaluate(kernel, lam)
        if p.phases.size and np.abs(p.phases).min() < ZERO_GUARD:
            p = _evaluate(kernel, lam + NUDGE)
        return p, ""
    except (NumericalError, np.linalg.LinAlgError, OverflowError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


@dataclass(frozen=True, eq=False)
class SecularScan:
    """Kernel eigenphases on a grid, columns following continuous trajectories."""

    method: str
    grid: np.ndarray
    det_values: np.ndarray
    eigenphases: np.ndarray
    valid: np.ndarray
    reasons: tuple[str, ...]
    vectors: np.ndarray = field(repr=False)
    kernel: Callable = field(repr=False)
    kernel_dimension: Callable | None = field(default=None, repr=False)
    zero_residual: Callable | None = field(default=None, repr=False)
    diagnostics: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return self.eigenphases.shape[1]

    def crossings(self):
        """``(k, k_next, j)`` for each grid cell where trajectory ``j`` changes sign near 0."""
        idx = np.flatnonzero(self.valid)
        out = []
        for k, kn in zip(idx[:-1], idx[1:]):
            a, b = self.eigenphases[k], self.eigenphases[kn]
            hit = (np.abs(a) < HALF_PI) & (np.abs(b) < HALF_PI) & ((a < 0) != (b < 0))
            out.extend((int(k), int(kn), int(j)) for j in np.flatnonzero(hit))
        return out


def _match(kernel, pa: _Point, pb: _Point, depth=0):
    overlap = np.abs(pa.vectors.conj().T @ pb.vectors)
    perm, ambiguous = kernels.greedy_assign(overlap, pa.phases, pb.phases, AMBIGUITY_GAP)
    if not ambiguous or depth >= MAX_SPLIT:
        return perm, ambiguous
    mid, _ = _eval_point(kernel, 0.5 * (pa.lam + pb.lam))
    if mid is None:
        return perm, ambiguous
    p1, amb1 = _match(kernel, pa, mid, depth + 1)
    p2, amb2 = _match(kernel, mid, pb, depth + 1)
    return p2[p1], amb1 or amb2


def scan_kernel(kernel, grid, method, threads=1, kernel_dimension=None, zero_residual=None):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda lam: _eval_point(kernel, lam), grid))
    else:
        results = [_eval_point(kernel, lam) for lam in grid]

    sizes = {p.phases.size for p, _ in results if p is not None}
    if len(sizes) > 1:
        raise ValueError(f"kernel dimension varies along the grid: {sorted(sizes)}")
    n = sizes.pop() if sizes else 0
    m = len(grid)
    used = grid.copy()
    dets = np.full(m, complex("nan"))
    phases = np.full((m, n), np.nan)
    vectors = np.full((m, n, n), np.nan, dtype=complex)
    valid = np.zeros(m, dtype=bool)
    reasons = []
    diags = []
    cols = np.arange(n)
    prev = None
    for k, (p, why) in enumerate(results):
        reasons.append(why)
        if p is None:
            continue
        if prev is not None:
            step, amb = _match(kernel, prev, p)
            if amb:
                diags.append(f"ambiguous eigenvector matching in ({prev.lam:.6g}, {p.lam:.6g})")
            cols = step[cols]
        used[k] = p.lam
        dets[k] = p.det
        phases[k] = p.phases[cols]
        vectors[k] = p.vectors[:, cols]
        valid[k] = True
        prev = p
    return SecularScan(method, used, dets, phases, valid, tuple(reasons), vectors,
                       kernel, kernel_dimension, zero_residual, tuple(diags))


def _bisect(kernel, lam_a, theta_a, vec, lam_b, tol):
    """Bisect trajectory ``vec`` whose phase changes sign on ``[lam_a, lam_b]``."""
    neg = theta_a < 0
    while lam_b - lam_a > tol:
        mid = 0.5 * (lam_a + lam_b)
        if mid in (lam_a, lam_b):
            break
        p = _evaluate_near(kernel, mid, lam_b - lam_a)
        if p is None:
            return None
        mid = p.lam
        j = int(np.argmax(np.abs(vec.conj() @ p.vectors)))
        theta = p.phases[j]
        if abs(theta) >= HALF_PI:
            return None
        if theta == 0:
            return mid
        if (theta < 0) == neg:
            lam_a, vec = mid, p.vectors[:, j]
        else:
            lam_b = mid
    return 0.5 * (lam_a + lam_b)


def _refine_cell(scan, k, kn, j, tol):
    kernel = scan.kernel
    root = _bisect(kernel, scan.grid[k], scan.eigenphases[k, j], scan.vectors[k][:, j],
                   scan.grid[kn], tol)
    if root is not None:
        return root
    # one level of 2x grid refinement before giving up
    pa, _ = _eval_point(kernel, scan.grid[k])
    pm, _ = _eval_point(kernel, 0.5 * (scan.grid[k] + scan.grid[kn]))
    if pa is None or pm is None:
        return None
    vec = scan.vectors[k][:, j]
    col = int(np.argmax(np.abs(vec.conj() @ pa.vectors)))
    perm, _ = _match(kernel, pa, pm)
    theta_m = pm.phases[perm[col]]
    theta_a = scan.eigenphases[k, j]
    if abs(theta_m) < HALF_PI and (theta_m < 0) != (theta_a < 0):
        return _bisect(kernel, pa.lam, theta_a, vec, pm.lam, tol)
    return _bisect(kernel, pm.lam, theta_m, pm.vectors[:, perm[col]], scan.grid[kn], tol)


def refine_roots(scan: SecularScan, tol=1e-10, tol_group=TOL_GROUP) -> SpectrumReport:
    """Bisect every eigenphase zero crossing and merge coincident roots."""
    roots = []
    diags = list(scan.diagnostics)
    for k, kn, j in scan.crossings():
        root = _refine_cell(scan, k, kn, j, tol)
        if root is None:
            diags.append(f"UnresolvedCrossing: trajectory {j} in "
                         f"({scan.grid[k]:.12g}, {scan.grid[kn]:.12g})")
            continue
        roots.append(root)
    centers, counts, _ = group_values(roots, tol_group)
    eigenvalues, mults, residuals = [], [], []
    for lam, count in zip(centers, counts):
        if scan.kernel_dimension is not None:
            dim = scan.kernel_dimension(lam)
            if dim != count:
                diags.append(f"lambda={lam:.12g}: {count} crossings, kernel dimension {dim}")
            count = dim if dim > 0 else count
        eigenvalues.append(lam)
        mults.append(count)
        residuals.append(_residual(scan.kernel, lam))
    if scan.zero_residual is not None and not any(abs(x) <= tol_group for x in eigenvalues):
        eigenvalues.insert(0, 0.0)
        mults.insert(0, 1)
        residuals.insert(0, float(scan.zero_residual()))
    return SpectrumReport(tuple(eigenvalues), tuple(mults), scan.method, tuple(residuals),
                          diagnostics=tuple(diags))


def _residual(kernel, lam) -> float:
    try:
        k = kernel(lam)
        return abs(linalg.det(np.eye(len(k)) - k))
    except (NumericalError, np.linalg.LinAlgError, OverflowError):
        return float("nan")


def compare_with_oracle(report: SpectrumReport, oracle, tol=1e-6, subset=False):
    """Walk report and oracle spectra in ascending order and list disagreements.

    ``oracle`` is an :class:`InteriorGraph` or a :class:`SpectrumReport`.
    With ``subset=True`` only spurious report entries (and multiplicities
    exceeding the oracle's) count, matching the sufficiency-only settings.
    """
    if isinstance(oracle, InteriorGraph):
        oracle = direct_spectrum(oracle)
    rep = list(zip(report.eigenvalues, report.multiplicities))
    ora = list(zip(oracle.eigenvalues, oracle.multiplicities))
    out = []
    i = j = 0
    while i < len(rep) or j < len(ora):
        if i < len(rep) and j < len(ora) and abs(rep[i][0] - ora[j][0]) <= tol:
            (x, got), (_, want) = rep[i], ora[j]
            if got != want and not (subset and got < want):
                out.append(Mismatch("multiplicity", x, want, got))
            i += 1
            j += 1
        elif j >= len(ora) or (i < len(rep) and rep[i][0] < ora[j][0]):
            out.append(Mismatch("spurious", rep[i][0], 0, rep[i][1]))
            i += 1
        else:
            if not subset:
                out.append(Mismatch("missing", ora[j][0], ora[j][1], 0))
            j += 1
    return tuple(out)


def with_oracle(report, g, tol=1e-6, subset=False) -> SpectrumReport:
    return replace(report, mismatches=compare_with_oracle(report, g, tol, subset))


def nullity(matrix_fn, tol=KERNEL_TOL):
    def count(lam):
        u = matrix_fn(lam)
        if u.shape[0] == 0:
            return 0
        s = np.linalg.svd(np.eye(len(u)) - u, compute_uv=False)
        return int((s < tol).sum())
    return count


def default_window(g: InteriorGraph, method, wiring=None):
    vmax = g.max_valency
    if wiring is not None and method in ("dangling", "extended"):
        vmax = int((g.valencies + wiring.counts).max())
    hi = 2 * vmax + 1
    return (1e-3, float(hi)) if method == "lead" else (-0.25, float(hi))


def default_step(window, vertex_count):
    return min(1e-2, (window[1] - window[0]) / (50 * vertex_count))


def make_grid(window, step):
    lo, hi = window
    if not hi > lo or not step > 0:
        raise ValueError("window must satisfy lo < hi and step must be positive")
    count = math.ceil((hi - lo) / step - 1e-9)
    return np.linspace(lo, hi, count + 1)


def build_kernel(g, method, wiring=None, w=None):
    """Return ``(kernel, kernel_dimension, zero_residual, wiring, w)`` for a method."""
    if method == "lead":
        wiring = wiring or full_wiring(g, "lead")
        w = w or default_w(g)
        system = LeadSystem(g, wiring, w)
        return system.kernel, None, (lambda: abs(system.z_r(0.0))), wiring, system.w
    if method == "dangling":
        wiring = wiring or full_wiring(g, "dangling")
        system = DanglingSystem(g, wiring)
        return system.kernel, None, None, wiring, None
    if method == "evolution":
        def kernel(lam):
            return evolution_operator(g, lam).matrix
        zero = (lambda: 0.0) if g.edge_count == 0 else None
        return kernel, nullity(kernel), zero, None, None
    if method == "extended":
        if wiring is None:
            raise ValueError("extended method needs a wiring")
        system = DanglingSystem(g, wiring)

        def kernel(lam):
            return system.bordered(lam).full
        return kernel, nullity(kernel), None, wiring, None
    raise ValueError(f"unknown method {method!r}")


def scan(g, wiring=None, method="lead", window=None, step=None, w=None, threads=1) -> SecularScan:
    kernel, dim, zero, wiring, w = build_kernel(g, method, wiring, w)
    window = window or default_window(g, method, wiring)
    if method == "lead" and not (0 < window[0] and window[1] < 4 * w):
        raise ValueError(f"lead scan window must lie inside (0, {4 * w})")
    step = step or default_step(window, g.vertex_count)
    return scan_kernel(kernel, make_grid(window, step), method, threads, dim, zero)


def solve_spectrum(g, method="lead", wiring=None, w=None, window=None, step=None,
                   tol=1e-10, threads=1) -> SpectrumReport:
    if method == "direct":
        return direct_spectrum(g)
    return refine_roots(scan(g, wiring, method, window, step, w, threads), tol)
