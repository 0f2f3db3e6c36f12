"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Kernel timings call both modules directly in one process.  End-to-end timings
run a small workload in a subprocess per backend, since the backend is fixed
at import time (PWTRAINS_PURE_PYTHON=1 forces the fallback).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from pwtrains import _pykernels, combine, make_train
from pwtrains._accel import BACKEND, kernels
from pwtrains.families import _small_tables
from pwtrains.pwcore import decompose

END_TO_END = """
import time
from pwtrains import BACKEND, dx_distance, make_train, polygonal_approximant, run_all
t0 = time.perf_counter()
dx_distance(make_train('smooth'), make_train('power:p=2:t=0.1'))
polygonal_approximant(make_train('power:p=2'), 0.01)
run_all(seed=7)
print(BACKEND, time.perf_counter() - t0)
"""


def _cells():
    f = combine([(1.5, make_train("smooth:t=0.05")), (-2.0, make_train("power:p=2.5"))])
    cells = decompose(f, 0.0, 30.0, breaks=range(1, 30))
    rows = [k for k, nl in enumerate(cells.nonlin) if len(nl) == 1]
    pick = lambda a: np.asarray(a, dtype=np.float64)[rows]  # noqa: E731
    return (np.array([cells.nonlin[k][0].kind for k in rows], dtype=np.int64),
            np.array([cells.nonlin[k][0].params for k in rows], dtype=np.float64),
            pick(cells.s), pick(cells.v), pick(cells.x0), pick(cells.x1), 1e-13)


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if BACKEND != "cython":
        print("compiled extension not available; only the Python backend can be timed")
        return 1

    cells = _cells()
    xs = np.random.default_rng(0).uniform(0, 40, 10 ** 6)
    heights = np.arange(45, dtype=np.float64) ** 2
    widths = np.ldexp(1.0, -(np.arange(45) + 1))
    spf, plist, rank = _small_tables()
    workloads = [
        (f"segment_stats ({len(cells[0])} cells)", lambda m: m.segment_stats(*cells)),
        ("train_values (1e6 points)", lambda m: m.train_values(xs, 0, 2.0, 0.0, 1, heights, widths)),
        ("bump_integral (tol 1e-13)", lambda m: m.bump_integral(-1.0, 1.0, 1e-13)),
        ("codec_roundtrip [2, 2e5]", lambda m: m.codec_roundtrip(2, 200000, spf, plist, rank)),
    ]
    print(f"{'kernel':34s} {'cython [s]':>12s} {'python [s]':>12s} {'speedup':>9s}")
    for name, call in workloads:
        tc = _time(lambda: call(kernels), args.repeat)
        tp = _time(lambda: call(_pykernels), max(1, args.repeat // 2))
        print(f"{name:34s} {tc:12.5f} {tp:12.5f} {tp / tc:8.1f}x")

    print()
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("PWTRAINS_PURE_PYTHON", None)
        if pure:
            env["PWTRAINS_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"end to end (dx, approximant, verify suite) [{out[0]:6s}] {float(out[1]):8.3f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
