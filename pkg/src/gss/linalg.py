"""Small dense linear-algebra helpers shared by the scattering modules."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

RCOND_MIN = 1e-12
LOG_RANGE = 300.0


class Singular(np.linalg.LinAlgError):
    def __init__(self, rcond):
        self.rcond = rcond
        super().__init__(f"reciprocal condition number {rcond:.3e}")


def solve(a, b, rcond_min=RCOND_MIN):
    """Solve ``a x = b`` by LU with partial pivoting.

    Raises :class:`Singular` when the 1-norm reciprocal condition estimate
    falls below ``rcond_min``.
    """
    a = np.asarray(a)
    if a.shape[0] == 0:
        return np.zeros_like(b, dtype=np.result_type(a, b))
    with warnings.catch_warnings():
        # exact singularity is reported below through rcond
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, np.linalg.norm(a, 1), norm="1")
    if info != 0 or not rcond >= rcond_min:
        raise Singular(float(rcond))
    return sla.lu_solve((lu, piv), b, check_finite=False)


@dataclass(frozen=True)
class LogDet:
    """Determinant held as ``phase * exp(logabs)``."""

    phase: complex
    logabs: float

    def to_complex(self) -> complex:
        if self.logabs == -np.inf:
            return 0j
        if abs(self.logabs) >= LOG_RANGE:
            raise OverflowError(f"|log det| = {abs(self.logabs):.1f} exceeds {LOG_RANGE}")
        return complex(self.phase * np.exp(self.logabs))

    @property
    def arg(self) -> float:
        return float(np.angle(self.phase))


def logdet(a) -> LogDet:
    a = np.asarray(a)
    if a.shape[0] == 0:
        return LogDet(1 + 0j, 0.0)
    sign, logabs = np.linalg.slogdet(a)
    return LogDet(complex(sign), float(logabs))


def det(a) -> complex:
    return logdet(a).to_complex()


def unitarity_defect(s) -> float:
    s = np.asarray(s)
    if s.size == 0:
        return 0.0
    return float(np.abs(s @ s.conj().T - np.eye(s.shape[0])).max())


def symmetry_defect(s) -> float:
    s = np.asarray(s)
    if s.size == 0:
        return 0.0
    return float(np.abs(s - s.T).max())
