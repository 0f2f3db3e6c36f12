import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from pwtrains import _pykernels as py
from pwtrains._accel import BACKEND, kernels
from pwtrains import combine, make_train
from pwtrains.pwcore import decompose

compiled = pytest.mark.skipif(BACKEND != "cython", reason="compiled extension not built")


def _single_segment_cells(f, hi):
    cells = decompose(f, 0.0, hi, breaks=range(1, int(hi)))
    rows = [k for k, nl in enumerate(cells.nonlin) if len(nl) == 1]
    kinds = np.array([cells.nonlin[k][0].kind for k in rows], dtype=np.int64)
    params = np.array([cells.nonlin[k][0].params for k in rows], dtype=np.float64)
    pick = lambda a: np.asarray(a, dtype=np.float64)[rows]  # noqa: E731
    return kinds, params, pick(cells.s), pick(cells.v), pick(cells.x0), pick(cells.x1)


CELL_SOURCES = [
    make_train("power:p=2.5"),
    make_train("power:p=0.6931471805599453:t=0.1"),
    make_train("smooth"),
    combine([(1.5, make_train("smooth:t=0.05")), (-2.0, make_train("triangle"))]),
]


def test_backend_is_reported():
    assert BACKEND in ("cython", "python")


def test_python_bump_values():
    assert py.bump(0.0) == 1.0
    assert py.bump(1.0) == 0.0 and py.bump(-1.0) == 0.0
    assert py.bump(0.5) == pytest.approx(math.exp(1 - 1 / 0.75), rel=1e-15)
    assert py.bump(1 - 1e-200) == 0.0


def test_bump_integral_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    g = lambda u: mpmath.exp(1 - 1 / (1 - u * u))  # noqa: E731
    for u0, u1 in ((-1.0, 1.0), (0.0, 0.5), (-0.9, 0.3), (0.7, 0.999)):
        ref = float(mpmath.quad(g, [u0, u1]))
        for mod in {py, kernels}:
            val, err = mod.bump_integral(u0, u1, 1e-13)
            assert abs(val - ref) <= max(err, 1e-15) + 1e-15


def test_adaptive_gk_polynomial_is_exact():
    val, err = py.adaptive_gk(lambda x: x ** 6 - 3 * x, 0.0, 2.0, 1e-14)
    assert val == pytest.approx(2 ** 7 / 7 - 6, rel=1e-14)


@pytest.mark.parametrize("src", range(len(CELL_SOURCES)))
def test_segment_stats_backends_agree(src):
    args = _single_segment_cells(CELL_SOURCES[src], 9.0)
    a = py.segment_stats(*args, 1e-13)
    b = kernels.segment_stats(*args, 1e-13)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-11, atol=1e-14)


def test_segment_stats_peaks_vs_dense_grid():
    kinds, params, s, v, x0, x1 = _single_segment_cells(CELL_SOURCES[3], 6.0)
    peak, l1, _ = kernels.segment_stats(kinds, params, s, v, x0, x1, 1e-13)
    for i in range(len(kinds)):
        xs = np.linspace(x0[i], x1[i], 2001)
        vals = [abs(py._seg_value(int(kinds[i]), tuple(params[i]), x) + s[i] * (x - x0[i]) + v[i])
                for x in xs]
        assert peak[i] >= max(vals) - 1e-12
        assert peak[i] <= max(vals) + 1e-6 * max(1.0, peak[i])
        assert l1[i] == pytest.approx(trapezoid(vals, xs), rel=1e-4, abs=1e-12)


@settings(max_examples=40)
@given(st.sampled_from([0, 1]), st.floats(0.3, 3.0), st.floats(0.0, 0.124),
       st.lists(st.floats(0, 30), min_size=1, max_size=200))
def test_train_values_backends_agree(kind, q, shift, xs):
    m = np.arange(40, dtype=np.float64)
    heights = m ** q
    halfwidths = np.ldexp(1.0, -(np.arange(40) + 1))
    xs = np.array(xs)
    a = py.train_values(xs, kind, q, shift, 1, heights, halfwidths)
    b = kernels.train_values(xs, kind, q, shift, 1, heights, halfwidths)
    assert np.allclose(a, b, rtol=1e-14, atol=0.0)


def test_spf_table_against_trial_division():
    spf = kernels.spf_table(5000)
    assert np.array_equal(spf, py.spf_table(5000))
    for n in range(2, 5001):
        p = next(d for d in range(2, n + 1) if n % d == 0)
        assert spf[n] == p


def test_codec_roundtrip_backends():
    spf = py.spf_table(20000)
    primes = np.array([p for p in range(2, 20001) if spf[p] == p], dtype=np.int64)
    rank = np.zeros(20001, dtype=np.int64)
    rank[primes] = np.arange(1, len(primes) + 1)
    assert py.codec_roundtrip(2, 20000, spf, primes, rank) == 0
    assert kernels.codec_roundtrip(2, 20000, spf, primes, rank) == 0
    broken = primes.copy()
    broken[3] = 11  # primes(4) should be 7
    assert py.codec_roundtrip(2, 20000, spf, broken, rank) == 7
    assert kernels.codec_roundtrip(2, 20000, spf, broken, rank) == 7


@compiled
def test_compiled_module_is_in_use():
    from pwtrains import _ckernels
    assert kernels is _ckernels


def test_pure_python_pipeline_matches():
    code = ("from pwtrains import BACKEND, dx_distance, make_train, combine;"
            "h = combine([(1.0, make_train('smooth')), (-0.5, make_train('power:p=2:t=0.1'))]);"
            "d = dx_distance(h);"
            "print(BACKEND, repr(d.value), repr(d.error_bound))")
    env = dict(os.environ, PWTRAINS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == "python"
    from pwtrains import dx_distance
    h = combine([(1.0, make_train("smooth")), (-0.5, make_train("power:p=2:t=0.1"))])
    d = dx_distance(h)
    assert abs(float(out[1]) - d.value) <= d.error_bound + float(out[2])
