"""Compiled vs pure-Python jet kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw product / chain-rule kernels, a jet-heavy workload (curvature
jets with third derivatives) and one full verification run per backend.
"""
import argparse
import timeit

import numpy as np

from lckblowup import _kernels_py, jets
from lckblowup.cli import RunConfig, run_pipeline


def _kernel_modules():
    mods = {"python": _kernels_py}
    try:
        from lckblowup import _kernels
        mods["cython"] = _kernels
    except ImportError:
        pass
    return mods


def _operands(m, order, rng):
    def one():
        g = rng.normal(size=m)
        h = rng.normal(size=(m, m))
        h = h + h.T
        t = None
        if order == 3:
            t = rng.normal(size=(m, m, m))
            t = sum(np.transpose(t, p) for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)))
        return float(rng.normal()), g, h, t
    return one(), one()


def bench_kernels(repeat, number=2000):
    rng = np.random.default_rng(0)
    rows = []
    for m in (4, 6):
        for order in (2, 3):
            (a0, a1, a2, a3), (b0, b1, b2, b3) = _operands(m, order, rng)
            for name, mod in _kernel_modules().items():
                t_mul = min(timeit.repeat(lambda: mod.mul(a0, a1, a2, a3, b0, b1, b2, b3),
                                          number=number, repeat=repeat)) / number
                t_chain = min(timeit.repeat(lambda: mod.chain(0.5, -0.25, 0.125, a1, a2, a3),
                                            number=number, repeat=repeat)) / number
                rows.append((f"mul   m={m} order={order}", name, t_mul))
                rows.append((f"chain m={m} order={order}", name, t_chain))
    return rows


def bench_workload(repeat):
    from lckblowup.bundle import curvature, make_bump
    from lckblowup.selftest import transition_points
    pts = transition_points(0.25, 60, n=3)
    curv = curvature(make_bump(0.25, 2.0))
    rows = []
    for name in jets.available_backends():
        jets.set_backend(name)
        t = min(timeit.repeat(lambda: [curv.jet(p) for p in pts], number=1, repeat=repeat))
        rows.append(("curvature jets, 60 points, n=3", name, t))
    return rows


def bench_pipeline(repeat):
    rows = []
    for n in (2, 3):
        cfg = RunConfig(n=n)
        for name in jets.available_backends():
            jets.set_backend(name)
            t = min(timeit.repeat(lambda: run_pipeline(cfg), number=1, repeat=max(1, repeat // 2)))
            rows.append((f"full verify n={n}", name, t))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = bench_kernels(args.repeat) + bench_workload(args.repeat) + bench_pipeline(args.repeat)
    by_case = {}
    for case, backend, t in rows:
        by_case.setdefault(case, {})[backend] = t
    print(f"{'case':34s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for case, times in by_case.items():
        py, cy = times.get("python"), times.get("cython")
        speed = f"{py / cy:7.2f}x" if py and cy else "      -"
        cy_s = f"{cy:12.3e}" if cy else f"{'n/a':>12s}"
        print(f"{case:34s} {py:12.3e} {cy_s} {speed}")


if __name__ == "__main__":
    main()
