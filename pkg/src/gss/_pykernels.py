"""Pure-Python implementations of the hot kernels (fallback backend)."""
import numpy as np


def sigma_coupling(v, lam):
    """The ``2 / (v (1 - i (1 - lam / v)))`` term shared by every sigma entry."""
    return 2.0 / (v * (1.0 - 1j * (1.0 - lam / v)))


def assemble_evolution(in_ptr, in_idx, out_ptr, out_idx, reverse, degree, lam):
    n = len(reverse)
    u = np.zeros((n, n), dtype=complex)
    lam = complex(lam)
    for i in range(len(degree)):
        ins = in_idx[in_ptr[i]:in_ptr[i + 1]]
        outs = out_idx[out_ptr[i]:out_ptr[i + 1]]
        if len(ins) == 0:
            continue
        c = sigma_coupling(float(degree[i]), lam)
        u[np.ix_(outs, ins)] = -1j * c
        u[reverse[ins], ins] += 1j
    return u


def _circ(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def greedy_assign(overlap, phase_a, phase_b, gap=0.1, phase_tol=1e-6):
    """Greedy maximal-overlap matching of eigenvectors between two points.

    ``overlap[j, m]`` is ``|<a_j, b_m>|``.  Returns ``(perm, ambiguous)``
    with ``perm[j]`` the column matched to row ``j``.  The match is
    ambiguous when some row's assigned overlap is within ``gap`` of its
    overlap with another row's column while both the row phases and the
    column phases are distinguishable.
    """
    n = overlap.shape[0]
    perm = np.full(n, -1, dtype=np.intp)
    col_used = np.zeros(n, dtype=bool)
    order = np.argsort(-overlap, axis=None, kind="stable")
    assigned = 0
    for flat in order:
        j, m = divmod(int(flat), n)
        if perm[j] >= 0 or col_used[m]:
            continue
        perm[j] = m
        col_used[m] = True
        assigned += 1
        if assigned == n:
            break
    ambiguous = False
    for j in range(n):
        best = overlap[j, perm[j]]
        for k in range(n):
            if k == j:
                continue
            m = perm[k]
            if best - overlap[j, m] < gap \
                    and _circ(phase_a[j], phase_a[k]) > phase_tol \
                    and _circ(phase_b[perm[j]], phase_b[m]) > phase_tol:
                ambiguous = True
                break
        if ambiguous:
            break
    return perm, ambiguous
