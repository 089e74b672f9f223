"""Time the compiled and pure-Python kernels against each other.

    python3 benchmarks/bench_kernels.py [--repeat N]

Reports the best-of-N time per call for evolution-operator assembly,
eigenvector matching, and a full evolution-method spectrum solve.
"""
import argparse
import timeit

import numpy as np

from gss import graphs, kernels
from gss.bond import evolution_operator
from gss.solver import solve_spectrum


def cases():
    rng = np.random.default_rng(3)
    yield "C12", graphs.cycle(12)
    yield "K8", graphs.complete(8)
    yield "random_v12", graphs.random_connected(12, rng, p=0.4)
    yield "random_v24", graphs.random_connected(24, rng, p=0.3)


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def run(repeat):
    backends = kernels.available_backends()
    if len(backends) < 2:
        print("compiled kernels not built; only", backends, "available")
    rng = np.random.default_rng(0)
    print(f"{'case':<12} {'kernel':<16}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>9}")
    for name, g in cases():
        n = 2 * g.edge_count
        q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        overlap = np.abs(q)
        pa, pb = rng.uniform(-np.pi, np.pi, n), rng.uniform(-np.pi, np.pi, n)
        jobs = {
            "assemble U": (lambda: evolution_operator(g, 1.3), 200),
            "greedy match": (lambda: kernels.greedy_assign(overlap, pa, pb), 200),
        }
        if g.vertex_count <= 12:
            jobs["solve (evol.)"] = (lambda: solve_spectrum(g, "evolution"), 1)
        start = kernels.backend()
        for job, (fn, number) in jobs.items():
            times = []
            for b in backends:
                kernels.use_backend(b)
                times.append(best(fn, repeat, number))
            kernels.use_backend(start)
            by = dict(zip(backends, times))
            ratio = by["python"] / by.get("cython", by["python"])
            cells = "".join(f"{t * 1e3:>10.3f}ms" for t in times)
            print(f"{name:<12} {job:<16}{cells}{ratio:>8.1f}x")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    run(ap.parse_args().repeat)
