"""Reference computations built without the library's scattering machinery.

Everything here works from edge lists and dense numpy linear algebra only.
"""
import numpy as np


def laplacian(n, edges):
    lap = np.zeros((n, n))
    for i, j in edges:
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    return lap


def spectrum(n, edges):
    return np.linalg.eigvalsh(laplacian(n, edges))


def grouped(values, tol=1e-6):
    """Sorted ``[(value, count)]`` merging neighbours closer than ``tol``."""
    out = []
    for x in np.sort(np.asarray(values, float)):
        if out and x - out[-1][0] <= tol:
            out[-1][1] += 1
        else:
            out.append([x, 1])
    return [(float(x), c) for x, c in out]


def xi_pair(lam, w):
    """Roots of ``xi^2 - (2 - lam/w) xi + 1``; minus root has Im < 0 in the open band."""
    r = np.roots([1.0, -(2.0 - lam / w), 1.0]).astype(complex)
    r = sorted(r, key=lambda z: z.imag)
    return r[0], r[1]


def lead_s_matrix(n, edges, attach, w, lam):
    """S from the scattering boundary-value problem, one column per incoming lead.

    Unknowns are the interior values and the outgoing amplitudes ``b``; lead
    site ``m >= 1`` of lead ``l`` carries ``a_l xm^(m-1) + b_l xp^(m-1)``.
    """
    xm, xp = xi_pair(lam, w)
    L = len(attach)
    lap = laplacian(n, edges)
    size = n + L
    out = np.zeros((L, L), complex)
    for col in range(L):
        a = np.zeros(L, complex)
        a[col] = 1
        m = np.zeros((size, size), complex)
        rhs = np.zeros(size, complex)
        m[:n, :n] = lap - lam * np.eye(n)
        for l, v in enumerate(attach):
            # interior vertex: w (f_v - site1) with site1 = a + b
            m[v, v] += w
            m[v, n + l] -= w
            rhs[v] += w * a[l]
            # first lead site
            r = n + l
            m[r, v] -= w
            m[r, n + l] += -w * xp + (2 * w - lam)
            rhs[r] -= -w * xm * a[l] + (2 * w - lam) * a[l]
        out[:, col] = np.linalg.solve(m, rhs)[n:]
    return out


def z_r_ratio(n, edges, w, lam):
    """``(-1)^V det(Delta - lam) / det(Delta - (lam - w))`` for full wiring."""
    lap = laplacian(n, edges)
    eye = np.eye(n)
    return (-1) ** n * np.linalg.det(lap - lam * eye) / np.linalg.det(lap - (lam - w) * eye)


def extended_laplacian(n, edges, attach):
    """Interior plus one pendant vertex per entry of ``attach``, assembled by blocks."""
    L = len(attach)
    W = np.zeros((n, L))
    for l, v in enumerate(attach):
        W[v, l] = 1
    top = laplacian(n, edges) + np.diag(W.sum(axis=1))
    return np.block([[top, -W], [-W.T, np.eye(L)]])


def composite_laplacian(n1, e1, n2, e2, links):
    B = np.zeros((n1, n2))
    for i, j in links:
        B[i, j] = 1
    return np.block([
        [laplacian(n1, e1) + np.diag(B.sum(axis=1)), -B],
        [-B.T, laplacian(n2, e2) + np.diag(B.sum(axis=0))],
    ])


def enlarged_laplacian(n, edges, attach):
    e = np.zeros((n, 1))
    e[list(attach), 0] = 1
    return np.block([[laplacian(n, edges) + np.diag(e[:, 0]), -e],
                     [-e.T, np.array([[float(len(attach))]])]])
