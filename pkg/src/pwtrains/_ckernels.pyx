# cython: language_level=3
"""Compiled kernels; algorithmic twin of ``_pykernels``."""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, floor, pow

cnp.import_array()

cdef enum:
    POWER = 1
    BUMP = 2
    TRAIN_TENT = 0
    MAX_DEPTH = 50
    STACK = 256

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]


cdef inline double c_bump(double u) nogil:
    cdef double d = (1.0 - u) * (1.0 + u)
    if d < 1e-300:
        return 0.0
    return exp(1.0 - 1.0 / d)


cdef inline double c_bump_d1(double u) nogil:
    cdef double d = (1.0 - u) * (1.0 + u)
    if d < 1e-3:
        return 0.0
    return exp(1.0 - 1.0 / d) * (-2.0 * u / (d * d))


cdef void c_gk15(double a, double b, double* k, double* e) nogil:
    cdef double half = 0.5 * (b - a)
    cdef double mid = 0.5 * (a + b)
    cdef double fc = c_bump(mid)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double dx, s
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        s = c_bump(mid - dx) + c_bump(mid + dx)
        resk += WGK[j] * s
        if j % 2 == 1:
            resg += WG[j // 2] * s
    k[0] = resk * half
    e[0] = fabs((resk - resg) * half)


cdef void c_bump_integral(double u0, double u1, double tol, double* val, double* err) nogil:
    cdef double lo_s[STACK]
    cdef double hi_s[STACK]
    cdef int dep_s[STACK]
    cdef int top = 0
    cdef double lo, hi, mid, k, e, length
    cdef int depth
    if u0 < -1.0:
        u0 = -1.0
    if u1 > 1.0:
        u1 = 1.0
    val[0] = 0.0
    err[0] = 0.0
    if u1 <= u0:
        return
    length = u1 - u0
    lo_s[0] = u0
    hi_s[0] = u1
    dep_s[0] = 0
    top = 1
    while top > 0:
        top -= 1
        lo = lo_s[top]
        hi = hi_s[top]
        depth = dep_s[top]
        c_gk15(lo, hi, &k, &e)
        if e <= tol * (hi - lo) / length or depth >= MAX_DEPTH or top + 2 > STACK:
            val[0] += k
            err[0] += e
        else:
            mid = 0.5 * (lo + hi)
            lo_s[top] = mid
            hi_s[top] = hi
            dep_s[top] = depth + 1
            lo_s[top + 1] = lo
            hi_s[top + 1] = mid
            dep_s[top + 1] = depth + 1
            top += 2


def bump(double u):
    return c_bump(u)


def bump_integral(double u0, double u1, double tol):
    cdef double v, e
    c_bump_integral(u0, u1, tol, &v, &e)
    return v, e


cdef struct Cell:
    int kind
    double p0, p1, p2, p3, p4
    double s, v, x0


cdef inline double seg_value(Cell* c, double x) nogil:
    cdef double ell
    if c.kind == POWER:
        ell = c.p1 * (x - c.p2) + c.p3
        if ell <= 0.0:
            return 0.0
        return c.p0 * pow(ell, c.p4)
    return c.p0 * c_bump((x - c.p1) / c.p2)


cdef inline double g_value(Cell* c, double x) nogil:
    return seg_value(c, x) + c.s * (x - c.x0) + c.v


cdef inline double dg_value(Cell* c, double x) nogil:
    return (c.p0 / c.p2) * c_bump_d1((x - c.p1) / c.p2) + c.s


cdef double bisect_g(Cell* c, double a, double b, double fa, bint deriv) nogil:
    cdef double m, fm
    cdef int it
    for it in range(200):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = dg_value(c, m) if deriv else g_value(c, m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a = m
            fa = fm
        else:
            b = m
    return 0.5 * (a + b)


cdef bint critical(Cell* c, double x1, double* out) nogil:
    cdef double r, ell, x, d0, d1
    if c.kind == POWER:
        if c.p4 == 1.0 or c.p0 == 0.0:
            return False
        r = -c.s / (c.p0 * c.p4 * c.p1)
        if r <= 0.0:
            return False
        ell = pow(r, 1.0 / (c.p4 - 1.0))
        x = c.p2 + (ell - c.p3) / c.p1
    else:
        d0 = dg_value(c, c.x0)
        d1 = dg_value(c, x1)
        if d0 * d1 >= 0.0:
            return False
        x = bisect_g(c, c.x0, x1, d0, True)
    if c.x0 < x < x1:
        out[0] = x
        return True
    return False


cdef double signed_integral(Cell* c, double a, double b, double tol, double* err) nogil:
    cdef double aff = (b - a) * (c.s * (0.5 * (a + b) - c.x0) + c.v)
    cdef double la, lb, hw, val, e
    err[0] = 0.0
    if c.kind == POWER:
        la = c.p1 * (a - c.p2) + c.p3
        lb = c.p1 * (b - c.p2) + c.p3
        if la < 0.0:
            la = 0.0
        if lb < 0.0:
            lb = 0.0
        return aff + c.p0 * (pow(lb, c.p4 + 1.0) - pow(la, c.p4 + 1.0)) / (c.p1 * (c.p4 + 1.0))
    hw = fabs(c.p0 * c.p2)
    if hw == 0.0:
        return aff
    c_bump_integral((a - c.p1) / c.p2, (b - c.p1) / c.p2, tol / hw, &val, &e)
    err[0] = hw * e
    return aff + c.p0 * c.p2 * val


cdef void one_cell(Cell* c, double x1, double tol, double* peak, double* l1, double* err) nogil:
    cdef double pts[3]
    cdef double gs[3]
    cdef double bnds[5]
    cdef int npts, nb, i
    cdef double xc, val, e, t
    pts[0] = c.x0
    if critical(c, x1, &xc):
        pts[1] = xc
        pts[2] = x1
        npts = 3
    else:
        pts[1] = x1
        npts = 2
    peak[0] = 0.0
    for i in range(npts):
        gs[i] = g_value(c, pts[i])
        t = fabs(gs[i])
        if t > peak[0]:
            peak[0] = t
    bnds[0] = pts[0]
    nb = 1
    for i in range(npts - 1):
        if gs[i] * gs[i + 1] < 0.0:
            bnds[nb] = bisect_g(c, pts[i], pts[i + 1], gs[i], False)
            nb += 1
        bnds[nb] = pts[i + 1]
        nb += 1
    l1[0] = 0.0
    err[0] = 0.0
    for i in range(nb - 1):
        if bnds[i + 1] <= bnds[i]:
            continue
        val = signed_integral(c, bnds[i], bnds[i + 1], tol, &e)
        l1[0] += fabs(val)
        err[0] += e


def segment_stats(kinds, params, slopes, values, x0s, x1s, double quad_tol):
    cdef cnp.int64_t[::1] k = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef double[:, ::1] p = np.ascontiguousarray(params, dtype=np.float64).reshape(-1, 5)
    cdef double[::1] s = np.ascontiguousarray(slopes, dtype=np.float64)
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] a = np.ascontiguousarray(x0s, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(x1s, dtype=np.float64)
    cdef Py_ssize_t n = k.shape[0], i
    peak_a = np.empty(n)
    l1_a = np.empty(n)
    err_a = np.empty(n)
    cdef double[::1] peak = peak_a
    cdef double[::1] l1 = l1_a
    cdef double[::1] err = err_a
    cdef Cell c
    with nogil:
        for i in range(n):
            c.kind = <int>k[i]
            c.p0 = p[i, 0]
            c.p1 = p[i, 1]
            c.p2 = p[i, 2]
            c.p3 = p[i, 3]
            c.p4 = p[i, 4]
            c.s = s[i]
            c.v = v[i]
            c.x0 = a[i]
            one_cell(&c, b[i], quad_tol, &peak[i], &l1[i], &err[i])
    return peak_a, l1_a, err_a


def train_values(xs, int kind, double q, double shift, long start, heights, halfwidths):
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    cdef double[::1] h = np.ascontiguousarray(heights, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(halfwidths, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], i, nh = h.shape[0]
    cdef long m
    cdef double d, u
    out_a = np.zeros(n)
    cdef double[::1] out = out_a
    with nogil:
        for i in range(n):
            m = <long>floor(x[i] - shift + 0.5)
            if m < start or m >= nh:
                continue
            d = fabs(x[i] - (<double>m + shift))
            if d == 0.0:
                out[i] = h[m]
                continue
            u = d / w[m]
            if not (u < 1.0):
                continue
            if kind == TRAIN_TENT:
                out[i] = h[m] * pow(1.0 - u, q)
            else:
                out[i] = h[m] * c_bump(u)
    return out_a.reshape(np.shape(xs))


def spf_table(long limit):
    spf_a = np.zeros(limit + 1, dtype=np.int32)
    cdef int[::1] spf = spf_a
    cdef long p, j
    with nogil:
        p = 2
        while p * p <= limit:
            if spf[p] == 0:
                j = p * p
                while j <= limit:
                    if spf[j] == 0:
                        spf[j] = <int>p
                    j += p
            p += 1
        for j in range(2, limit + 1):
            if spf[j] == 0:
                spf[j] = <int>j
        if limit >= 1:
            spf[1] = 1
    return spf_a


def codec_roundtrip(long lo, long hi, spf, primes, rank):
    cdef int[::1] sp = np.ascontiguousarray(spf, dtype=np.int32)
    cdef cnp.int64_t[::1] pr = np.ascontiguousarray(primes, dtype=np.int64)
    cdef cnp.int64_t[::1] rk = np.ascontiguousarray(rank, dtype=np.int64)
    cdef long n, x, p, i, j, e, cnt
    cdef long long prod
    cdef long idx[32]
    cdef long ex[32]
    cdef long bad = 0
    with nogil:
        for n in range(lo, hi + 1):
            x = n
            cnt = 0
            while x > 1:
                p = sp[x]
                i = rk[p]
                if cnt > 0 and idx[cnt - 1] == i:
                    ex[cnt - 1] += 1
                else:
                    idx[cnt] = i
                    ex[cnt] = 1
                    cnt += 1
                x = x // p
            prod = 1
            for j in range(cnt):
                for e in range(ex[j]):
                    prod *= pr[idx[j] - 1]
            if prod != n:
                bad = n
                break
    return bad
