"""Pure-Python reference kernels.

Same signatures and algorithms as the compiled ``_ckernels`` module; used when
the extension is unavailable and as the oracle in the backend-equivalence tests.

Segment encoding shared with ``pwcore`` (``params`` rows have five slots)::

    POWER  (c, a, o, b, q)   x -> c * (a*(x - o) + b)**q      on a*(x-o)+b >= 0
    BUMP   (h, o, w, 0, 0)   x -> h * bump((x - o) / w)

Every ``segment_stats`` cell adds an affine part ``s*(x - x0) + v`` and must be
free of inflection points of the segment (callers split bumps at their center
and at +-INFLECTION).
"""
import math

import numpy as np

POWER = 1
BUMP = 2

TRAIN_TENT = 0
TRAIN_BUMP = 1

# |u| of the two inflection points of bump() on each side: 6u^4 = 2
INFLECTION = 3.0 ** -0.25

# Gauss-Kronrod 15/7 rule (QUADPACK qk15)
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

MAX_DEPTH = 50


def bump(u):
    """exp(1 - 1/(1 - u^2)) on |u| < 1, zero elsewhere."""
    d = (1.0 - u) * (1.0 + u)
    if d < 1e-300:
        return 0.0
    return math.exp(1.0 - 1.0 / d)


def bump_d1(u):
    d = (1.0 - u) * (1.0 + u)
    # exp(1 - 1/d) underflows to 0 well before d*d does
    if d < 1e-3:
        return 0.0
    return math.exp(1.0 - 1.0 / d) * (-2.0 * u / (d * d))


def gk15(fn, a, b):
    """Kronrod estimate and |Kronrod - Gauss| on [a, b]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fc = fn(mid)
    resk = fc * WGK[7]
    resg = fc * WG[3]
    for j in range(7):
        dx = half * XGK[j]
        s = fn(mid - dx) + fn(mid + dx)
        resk += WGK[j] * s
        if j % 2 == 1:
            resg += WG[j // 2] * s
    return resk * half, abs((resk - resg) * half)


def adaptive_gk(fn, a, b, tol):
    """Globally adaptive by local bisection; returns (value, error estimate)."""
    if b <= a:
        return 0.0, 0.0
    length = b - a
    total = 0.0
    err = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        k, e = gk15(fn, lo, hi)
        if e <= tol * (hi - lo) / length or depth >= MAX_DEPTH:
            total += k
            err += e
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    return total, err


def bump_integral(u0, u1, tol):
    u0 = max(u0, -1.0)
    u1 = min(u1, 1.0)
    return adaptive_gk(bump, u0, u1, tol)


def _bisect(fn, a, b, fa):
    for _ in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _seg_value(kind, p, x):
    if kind == POWER:
        c, a, o, b, q = p
        ell = a * (x - o) + b
        if ell <= 0.0:
            return 0.0
        return c * ell ** q
    h, o, w = p[0], p[1], p[2]
    return h * bump((x - o) / w)


def _critical(kind, p, s, x0, x1):
    """Interior stationary point of segment + slope*s, or None."""
    if kind == POWER:
        c, a, o, b, q = p
        if q == 1.0 or c == 0.0:
            return None
        r = -s / (c * q * a)
        if r <= 0.0:
            return None
        try:
            ell = r ** (1.0 / (q - 1.0))
        except OverflowError:
            return None
        x = o + (ell - b) / a
        return x if x0 < x < x1 else None
    h, o, w = p[0], p[1], p[2]
    scale = h / w

    def dg(x):
        return scale * bump_d1((x - o) / w) + s

    d0 = dg(x0)
    d1 = dg(x1)
    if d0 * d1 >= 0.0:
        return None
    x = _bisect(dg, x0, x1, d0)
    return x if x0 < x < x1 else None


def _signed_integral(kind, p, s, v, x0, a, b, tol):
    aff = (b - a) * (s * (0.5 * (a + b) - x0) + v)
    if kind == POWER:
        c, sl, o, off, q = p
        la = max(sl * (a - o) + off, 0.0)
        lb = max(sl * (b - o) + off, 0.0)
        return aff + c * (lb ** (q + 1.0) - la ** (q + 1.0)) / (sl * (q + 1.0)), 0.0
    h, o, w = p[0], p[1], p[2]
    hw = abs(h * w)
    if hw == 0.0:
        return aff, 0.0
    val, err = bump_integral((a - o) / w, (b - o) / w, tol / hw)
    return aff + h * w * val, hw * err


def _one_cell(kind, p, s, v, x0, x1, tol):
    def g(x):
        return _seg_value(kind, p, x) + s * (x - x0) + v

    xc = _critical(kind, p, s, x0, x1)
    pts = (x0, x1) if xc is None else (x0, xc, x1)
    gs = [g(x) for x in pts]
    peak = max(abs(t) for t in gs)
    bounds = [pts[0]]
    for i in range(len(pts) - 1):
        if gs[i] * gs[i + 1] < 0.0:
            bounds.append(_bisect(g, pts[i], pts[i + 1], gs[i]))
        bounds.append(pts[i + 1])
    l1 = 0.0
    err = 0.0
    for a, b in zip(bounds, bounds[1:]):
        if b <= a:
            continue
        val, e = _signed_integral(kind, p, s, v, x0, a, b, tol)
        l1 += abs(val)
        err += e
    return peak, l1, err


def segment_stats(kinds, params, slopes, values, x0s, x1s, quad_tol):
    """Per cell: (max |g|, integral of |g|, quadrature error) with
    g = segment + slope*(x - x0) + value on [x0, x1]."""
    n = len(kinds)
    peak = np.empty(n)
    l1 = np.empty(n)
    err = np.empty(n)
    for i in range(n):
        peak[i], l1[i], err[i] = _one_cell(
            int(kinds[i]), tuple(float(t) for t in params[i]), float(slopes[i]),
            float(values[i]), float(x0s[i]), float(x1s[i]), quad_tol,
        )
    return peak, l1, err


def _bump_array(u):
    out = np.zeros_like(u)
    d = (1.0 - u) * (1.0 + u)
    live = d >= 1e-300
    out[live] = np.exp(1.0 - 1.0 / d[live])
    return out


def train_values(xs, kind, q, shift, start, heights, halfwidths):
    """Evaluate a lattice train (centers m + shift) at every x.

    ``heights``/``halfwidths`` are indexed by m and must cover every index
    whose center is nearest to some x.
    """
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros(xs.shape)
    mi = np.floor(xs - shift + 0.5).astype(np.int64)
    ok = (mi >= start) & (mi < len(heights))
    idx = mi[ok]
    x = xs[ok]
    d = np.abs(x - (idx.astype(np.float64) + shift))
    h = heights[idx]
    w = halfwidths[idx]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u = d / w
        if kind == TRAIN_TENT:
            val = np.where(u < 1.0, h * np.maximum(1.0 - u, 0.0) ** q, 0.0)
        else:
            val = h * _bump_array(np.where(u < 1.0, u, 1.0))
    out[ok] = np.where(d == 0.0, h, val)
    return out


def spf_table(limit):
    """Smallest prime factor of every integer in [0, limit] (spf[0]=0, spf[1]=1)."""
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p::p]
            seg[seg == 0] = p
    rest = spf == 0
    spf[rest] = np.arange(limit + 1, dtype=np.int32)[rest]
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return spf


def codec_roundtrip(lo, hi, spf, primes, rank):
    """Factor n via spf into prime-rank exponents, rebuild prod primes[i]**e,
    and return the first n in [lo, hi] that does not round-trip (0 if none)."""
    spf = spf.tolist() if hasattr(spf, "tolist") else spf
    primes = primes.tolist() if hasattr(primes, "tolist") else primes
    rank = rank.tolist() if hasattr(rank, "tolist") else rank
    for n in range(lo, hi + 1):
        x = n
        exps = {}
        while x > 1:
            p = spf[x]
            i = rank[p]
            exps[i] = exps.get(i, 0) + 1
            x //= p
        prod = 1
        for i, e in exps.items():
            prod *= primes[i - 1] ** e
        if prod != n:
            return n
    return 0
