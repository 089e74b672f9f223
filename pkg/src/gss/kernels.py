"""Backend selection for the hot kernels.

The compiled extension ``gss._ckernels`` is used when it imports; otherwise
the pure-Python versions in ``gss._pykernels`` are used.  Setting
``GSS_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("GSS_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name: str):
    """Switch backend at runtime; returns the previous backend name."""
    global _active
    previous = backend()
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None
    return previous


def assemble_evolution(topology, degree, lam) -> np.ndarray:
    """Dense evolution operator ``U[d', d] = sigma^{t(d)}_{d', d}`` for ``t(d) = o(d')``."""
    return _active.assemble_evolution(
        topology.in_ptr, topology.in_idx, topology.out_ptr, topology.out_idx,
        topology.reverse, np.ascontiguousarray(degree, dtype=float), complex(lam),
    )


def greedy_assign(overlap, phase_a, phase_b, gap=0.1, phase_tol=1e-6):
    return _active.greedy_assign(
        np.ascontiguousarray(overlap, dtype=float),
        np.ascontiguousarray(phase_a, dtype=float),
        np.ascontiguousarray(phase_b, dtype=float),
        gap, phase_tol,
    )
