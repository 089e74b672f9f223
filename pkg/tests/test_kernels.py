import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gss import _pykernels, kernels
from gss.bond import evolution_operator
from test_graph import connected_graphs

BACKENDS = kernels.available_backends()


def test_backend_switch_roundtrip():
    start = kernels.backend()
    prev = kernels.use_backend("python")
    assert prev == start and kernels.backend() == "python"
    kernels.use_backend(start)
    assert kernels.backend() == start
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@pytest.mark.skipif(os.environ.get("GSS_PURE_PYTHON", "") not in ("", "0"),
                    reason="pure-Python backend forced")
def test_compiled_backend_built():
    # the extension is optional, but the editable install is expected to build it
    assert "cython" in BACKENDS


@given(connected_graphs(max_vertices=8), st.floats(-3, 20))
@settings(max_examples=40, deadline=None)
def test_assemble_evolution_backends_agree(g, lam):
    if g.edge_count == 0:
        return
    t = g.bond_topology
    deg = g.valencies.astype(float)
    args = (t.in_ptr, t.in_idx, t.out_ptr, t.out_idx, t.reverse, deg, complex(lam))
    ref = _pykernels.assemble_evolution(*args)
    for name in BACKENDS:
        prev = kernels.use_backend(name)
        try:
            np.testing.assert_allclose(kernels.assemble_evolution(t, deg, lam), ref, atol=1e-15)
        finally:
            kernels.use_backend(prev)


@given(st.integers(1, 7), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_greedy_assign_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    overlap = np.abs(q)
    pa, pb = rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n)
    results = []
    for name in BACKENDS:
        prev = kernels.use_backend(name)
        try:
            perm, amb = kernels.greedy_assign(overlap, pa, pb)
        finally:
            kernels.use_backend(prev)
        assert sorted(perm) == list(range(n))
        results.append((list(perm), bool(amb)))
    assert all(r == results[0] for r in results)


def test_greedy_assign_identity():
    perm, amb = kernels.greedy_assign(np.eye(4), np.zeros(4), np.zeros(4))
    assert list(perm) == [0, 1, 2, 3] and not amb


def test_greedy_assign_flags_ambiguity():
    overlap = np.full((2, 2), np.sqrt(0.5))
    perm, amb = kernels.greedy_assign(overlap, np.array([0.1, 1.0]), np.array([0.2, 1.1]))
    assert amb
    assert sorted(perm) == [0, 1]


def test_evolution_operator_uses_active_backend(backend):
    from gss import graphs
    u = evolution_operator(graphs.cycle(3), 1.0).matrix
    assert np.allclose(u @ u.conj().T, np.eye(6))
