"""Benchmark the compiled edge-recursion kernel against the numpy one.

Two levels are timed:

* the raw ``edge_term_table`` recursion on synthetic edge batches of
  several sizes, and
* end-to-end ``spatial_L`` / ``grad_spatial_L`` / ``C_nf`` evaluations
  on a tessellated sphere, with the backend swapped in place.

Run with ``python3 benchmarks/bench_backends.py``.
"""

import argparse
import time

import numpy as np

from eshelby import _backend, _moments_py
from eshelby import kernels_transient as kt
from eshelby.geometry import Material, tessellate_sphere
from eshelby.kernels_transient import C_nf, SeriesParams, spatial_L

try:
    from eshelby import _moments_cy
except ImportError:
    _moments_cy = None


def _time(fn, min_repeat=5, min_seconds=0.2):
    # warm up once, then repeat until the budget is spent
    fn()
    times = []
    start = time.perf_counter()
    while len(times) < min_repeat or time.perf_counter() - start < min_seconds:
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_raw(rng):
    print("raw edge_term_table (best of repeats, per call)")
    print(f"{'edges':>8} {'jmax':>5} {'python':>12} {'cython':>12} "
          f"{'speedup':>8}")
    for ne in (64, 512, 4096, 32768):
        for jmax in (4, 12, 24):
            a = rng.uniform(-0.5, 0.5, ne)
            b = rng.uniform(0.05, 0.5, ne)
            lp = rng.uniform(0.0, 0.5, ne)
            lm = rng.uniform(-0.5, 0.0, ne)
            tp = _time(lambda: _moments_py.edge_term_table(a, b, lp, lm,
                                                           jmax))
            if _moments_cy is None:
                print(f"{ne:>8} {jmax:>5} {tp * 1e6:>10.1f}us "
                      f"{'n/a':>12} {'n/a':>8}")
                continue
            tc = _time(lambda: _moments_cy.edge_term_table(a, b, lp, lm,
                                                           jmax))
            ref, dref = _moments_py.edge_term_table(a, b, lp, lm, jmax)
            got, dgot = _moments_cy.edge_term_table(a, b, lp, lm, jmax)
            assert np.allclose(ref, got, rtol=1e-12, atol=1e-300)
            assert np.allclose(dref, dgot, rtol=1e-12)
            print(f"{ne:>8} {jmax:>5} {tp * 1e6:>10.1f}us "
                  f"{tc * 1e6:>10.1f}us {tp / tc:>7.2f}x")


def bench_kernels():
    mesh = tessellate_sphere(0.1, 4)
    mat = Material(K=0.05, Cp=1.0)
    sp = SeriesParams(n_max=10)
    x = np.array([0.03, -0.02, 0.15])
    cases = {
        "spatial_L": lambda: spatial_L(mesh, x, 2.0, mat, sp),
        "C_nf window [0,2]": lambda: C_nf(mesh, x, 2.0, 0.0, 2.0, 0,
                                          mat, sp),
    }
    backends = [("python", _moments_py.edge_term_table)]
    if _moments_cy is not None:
        backends.append(("cython", _moments_cy.edge_term_table))

    print("\nkernel evaluations on a 1024-face sphere mesh, per call")
    print(f"{'case':>20} " + " ".join(f"{n:>12}" for n, _ in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    saved = kt.edge_term_table
    try:
        for name, fn in cases.items():
            row = []
            for _, table in backends:
                # kernels_transient binds the table at import time, so
                # the swap happens on its module attribute
                kt.edge_term_table = table
                row.append(_time(fn))
            cells = " ".join(f"{t * 1e3:>10.3f}ms" for t in row)
            tail = (f" {row[0] / row[1]:>8.2f}x" if len(row) == 2 else "")
            print(f"{name:>20} {cells}{tail}")
    finally:
        kt.edge_term_table = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    print(f"active backend: {_backend.BACKEND_NAME}")
    bench_raw(np.random.default_rng(args.seed))
    bench_kernels()


if __name__ == "__main__":
    main()
