"""Compare the compiled core with the numpy fallback.

    python benchmarks/bench_core.py [--repeat N]

Times the two hot kernels (pair-block assembly and the exponential sums
behind the Mellin transform) on both backends and reports the speedup and
the largest relative disagreement.
"""
import argparse
import time

import numpy as np

from riesz_mellin import _backend, _core_py
from riesz_mellin.geometry import build_boundary
from riesz_mellin.sobolev import polygon_space


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def pair_case(n):
    sp = polygon_space(build_boundary([[0, 0], [1, 0], [1, 1], [0, 1]]), n)
    pq = sp.pairs
    cls = max(pq.classes, key=lambda c: len(c.K))

    def run(backend):
        return lambda: pq.blocks(cls, _core_py.RIESZ, backend)
    return f"pair_blocks square n={n} ({cls.name}, {len(cls.K)} pairs)", run


def exp_case(m):
    rng = np.random.default_rng(0)
    t = np.linspace(-30, 30, m)
    g = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    xi = np.linspace(-40, 40, m)

    def run(backend):
        return lambda: _backend.exp_sum(t, g, xi, -1.0, backend)
    return f"exp_sum {m} x {m}", run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _backend.HAVE_COMPILED:
        print("compiled core not built; only the numpy backend is available")
    cases = [pair_case(64), pair_case(256), exp_case(1000), exp_case(4000)]
    print(f"{'case':52s} {'numpy s':>9s} {'compiled s':>11s} {'speedup':>8s} {'rel diff':>9s}")
    for label, run in cases:
        t_np, ref = best_of(run("numpy"), args.repeat)
        if _backend.HAVE_COMPILED:
            t_c, out = best_of(run("compiled"), args.repeat)
            diff = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
            print(f"{label:52s} {t_np:9.4f} {t_c:11.4f} {t_np / t_c:8.1f} {diff:9.1e}")
        else:
            print(f"{label:52s} {t_np:9.4f} {'-':>11s} {'-':>8s} {'-':>9s}")


if __name__ == "__main__":
    main()
