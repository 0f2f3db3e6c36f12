"""Constructive approximants with checkable certificates.

* :func:`polygonal_approximant` -- cutoff polygon b with d_X(f, b) < eps;
* :func:`sequence_approximant` -- eventually-zero sequence of such polygons
  close to a null sequence in the c0 sup metric;
* :func:`bump_perturb` -- f plus a thin spike train: d_X-close to f, yet
  exceeding any given bound.
"""
from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import CertificateError, KnotBudgetError, ParameterError
from .families import make_cutoff_polygonal, polygonal_from_knots
from .metrics import DEFAULT, MetricValue, ToleranceConfig, dc0_distance, dx_distance
from .pwcore import (
    ZERO, FinitePiecewise, Interval, LazyTrain, cell_stats, decompose, evaluate,
    evaluate_many, integrate_abs_detail, is_zero, linear_combination,
)

__all__ = [
    "ApproxCertificate", "polygonal_approximant", "sequence_approximant", "bump_perturb",
    "knots_csv", "DEFAULT_KNOT_BUDGET",
]

DEFAULT_KNOT_BUDGET = 10 ** 6


@dataclass
class ApproxCertificate:
    epsilon: float
    achieved_distance: MetricValue
    N: int
    gamma: float
    budget_split: list
    kind: str = "polygonal"
    extra: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.achieved_distance.value + self.achieved_distance.error_bound < self.epsilon

    def to_json(self):
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "achieved_distance": self.achieved_distance.to_json(),
            "N": self.N,
            "gamma": self.gamma,
            "budget_split": list(self.budget_split),
            "extra": dict(self.extra),
        }


def _check_eps(epsilon):
    if not (isinstance(epsilon, (int, float)) and math.isfinite(epsilon) and epsilon > 0):
        raise ParameterError(f"epsilon must be a positive finite real, got {epsilon!r}")
    return float(epsilon)


def _tail_integral(f, a, cfg, budget):
    """Upper bound on the integral of |f| over [a, +inf)."""
    val, err, _ = integrate_abs_detail(f, Interval(a, math.inf), budget, cfg.quad_tol)
    return val + err


def _refine(f, n, delta, cfg, knot_budget):
    """Knots on [0, n] whose interpolating polygon is within delta of f.

    Every cell of f's decomposition is bisected until the exact sup error of
    the chord is <= delta.  Returns (knots, values, sup_err, l1_err, quad_err).
    """
    cells = decompose(f, 0.0, float(n), breaks=range(1, int(n)))
    xs = list(cells.x0) + [cells.x1[-1]] if len(cells) else [0.0, float(n)]
    fvals = dict(zip(xs, evaluate_many(f, xs).tolist()))
    pending = [(cells.x0[i], cells.x1[i], i) for i in range(len(cells))]
    done = []
    best = math.inf
    while pending:
        if len(fvals) > knot_budget:
            raise KnotBudgetError(
                f"knot budget {knot_budget} exhausted; best sup error {best:.3g}", best)
        x0s, x1s, ss, vs, nls = [], [], [], [], []
        for a, b, i in pending:
            fa, fb = fvals[a], fvals[b]
            chord = (fb - fa) / (b - a)
            s_cell = cells.s[i]
            x0s.append(a)
            x1s.append(b)
            ss.append(s_cell - chord)
            vs.append(cells.v[i] + s_cell * (a - cells.x0[i]) - fa)
            nls.append(cells.nonlin[i])
        peak, l1, err = cell_stats(x0s, x1s, ss, vs, nls, cfg.quad_tol)
        nxt = []
        mids = []
        for k, (a, b, i) in enumerate(pending):
            m = 0.5 * (a + b)
            if peak[k] <= delta or not a < m < b:
                done.append((peak[k], l1[k], err[k]))
            else:
                nxt.append((a, m, i))
                nxt.append((m, b, i))
                mids.append(m)
        if mids:
            best = min(best, float(np.max(peak)))
            fvals.update(zip(mids, evaluate_many(f, mids).tolist()))
        pending = nxt
    knots = sorted(fvals)
    sup_err = max((d[0] for d in done), default=0.0)
    l1_err = math.fsum(d[1] for d in done)
    quad_err = math.fsum(d[2] for d in done)
    return knots, [fvals[x] for x in knots], sup_err, l1_err, quad_err


def polygonal_approximant(f, epsilon, cfg: ToleranceConfig = DEFAULT,
                          knot_budget: int = DEFAULT_KNOT_BUDGET):
    """Cutoff polygon b with certified d_X(f, b) < epsilon.

    Runs at target = epsilon/2: N is the least integer with 2**-N and the
    tail integral of |f| past N both below target/6; the polygon interpolates
    f at its knots on [0, N] with sup error below target/(6N); the ramp width
    is gamma = target/(6(1 + |f(N)|)).
    """
    eps = _check_eps(epsilon)
    target = eps / 2.0
    share = target / 6.0
    n = 1
    while math.ldexp(1.0, -n) >= share:
        n += 1
    if is_zero(f):
        d = MetricValue(0.0, 0.0, 0)
        cert = ApproxCertificate(eps, d, n, 0.0, [0.0, math.ldexp(1.0, -n), 0.0, 0.0, 0.0, 0.0],
                                 extra={"knots": 0})
        return ZERO, cert
    tail_budget = share / 100.0
    while _tail_integral(f, float(n), cfg, tail_budget) >= share:
        n += 1
        if n > 4096:
            raise CertificateError("no cutoff index with a small enough tail integral")
    delta = share / n
    knots, vals, sup_err, l1_err, quad_err = _refine(f, n, delta, cfg, knot_budget)
    fn = vals[-1]
    gamma = share / (1.0 + abs(fn))
    p = polygonal_from_knots(knots, vals)
    b = make_cutoff_polygonal(p, n, gamma)
    near = integrate_abs_detail(f, Interval(float(n), n + gamma), 0.0, cfg.quad_tol)
    far = _tail_integral(f, n + gamma, cfg, tail_budget)
    split = [
        sup_err * (1.0 - math.ldexp(1.0, -n)),
        math.ldexp(1.0, -n),
        l1_err + quad_err,
        near[0] + near[1],
        0.5 * abs(fn) * gamma,
        far,
    ]
    d = dx_distance(f, b, cfg)
    cert = ApproxCertificate(eps, d, n, gamma, split,
                             extra={"knots": len(knots), "sup_error": sup_err, "f_at_N": fn})
    if not cert.certified:
        raise CertificateError(
            f"d_X(f, b) = {d.value:.6g} +- {d.error_bound:.3g} is not below {eps}")
    return b, cert


def sequence_approximant(seq: Callable[[int], object], epsilon,
                         tail: Callable[[int], float], cfg: ToleranceConfig = DEFAULT,
                         max_index: int = 10000):
    """Eventually-zero (b_1, ..., b_{n0-1}, 0, ...) within epsilon of (f_n)_n in
    the c0 sup metric; ``tail(n)`` must bound d_X(f_m, 0) for all m >= n."""
    eps = _check_eps(epsilon)
    if tail is None:
        raise ParameterError("sequence_approximant needs a tail bound for d_X(f_n, 0)")
    n1 = 1
    while not tail(n1) < eps:
        n1 += 1
        if n1 > max_index:
            raise CertificateError("tail bound never drops below epsilon")
    dists = {k: dx_distance(seq(k), None, cfg) for k in range(1, n1)}
    n0 = n1
    while n0 > 1 and dists[n0 - 1].upper < eps:
        n0 -= 1
    prefix = []
    for k in range(1, n0):
        b, _ = polygonal_approximant(seq(k), eps / 2.0, cfg)
        prefix.append(b)

    def approx_seq(k):
        return prefix[k - 1] if k < n0 else ZERO

    def cert_tail(k):
        return tail(k) if k >= n0 else math.inf

    d = dc0_distance(seq, approx_seq, cfg, monotone_tail=cert_tail)
    split = [max((dists[k].upper for k in range(n0, n1)), default=0.0), tail(n1)]
    cert = ApproxCertificate(eps, d, n0, 0.0, split, kind="sequence",
                             extra={"n0": n0, "n1": n1})
    if not cert.certified:
        raise CertificateError(f"c0 distance {d.value:.6g} is not below {eps}")
    return prefix, cert


def _dyadic_floor(x):
    """Largest power of two <= x (x > 0), as an exact Fraction."""
    e = math.frexp(x)[1] - 1
    return Fraction(2) ** e


def bump_perturb(f, epsilon, bound, cfg: ToleranceConfig = DEFAULT):
    """g = f + spikes with d_X(f, g) < epsilon and |g(x0)| > bound.

    Spike k (k = 1, 2, ...) is a triangle centred at K + k - 1/2 with signed
    height sign(f(c_k))*(bound + k + |f(c_k)|) and halfwidth chosen so its area
    is <= epsilon/(8*2**k).  Spikes sit past K, where 2**-K < epsilon/4, so the
    series part of d_X is <= 2**-K and the L1 part <= epsilon/8.
    """
    eps = _check_eps(epsilon)
    if int(bound) != bound or bound < 0:
        raise ParameterError(f"bound must be a nonnegative integer, got {bound!r}")
    # least K with 2**(1-K) < eps/2
    big_k = math.floor(1.0 + math.log2(2.0 / eps)) + 1
    while not math.ldexp(1.0, 1 - big_k) < eps / 2.0:
        big_k += 1

    @functools.lru_cache(maxsize=None)
    def f_at(m):
        return evaluate(f, m + 0.5)

    def height(m):
        k = m - big_k + 1
        v = f_at(m)
        mag = bound + k + abs(v)
        return -mag if v < 0 else mag

    @functools.lru_cache(maxsize=None)
    def halfwidth(m):
        k = m - big_k + 1
        cap = min(math.ldexp(1.0, -(m + 2)), eps / (8.0 * abs(height(m)) * 2.0 ** k))
        return _dyadic_floor(cap)

    def tail(n):
        # spikes k > n - K + 1 carry area <= eps/8 * 2**-k each
        k = max(0, n - big_k + 1)
        return eps / 8.0 * math.ldexp(1.0, -k)

    spikes = LazyTrain(kind="tent", height=height, halfwidth=halfwidth, tail=tail,
                       start_index=big_k, shift=0.5, q=1.0, label="spikes")
    g = linear_combination([(1.0, f), (1.0, spikes)])
    x0 = big_k + 0.5
    gx0 = evaluate(g, x0)
    d = dx_distance(f, g, cfg)
    cert = ApproxCertificate(eps, d, big_k, 0.0, [eps / 8.0, math.ldexp(1.0, -big_k)],
                             kind="perturbation",
                             extra={"x0": x0, "g_at_x0": gx0, "bound": int(bound)})
    if not (cert.certified and abs(gx0) > bound):
        raise CertificateError("perturbation certificate failed")
    return g, cert


def knots_csv(b: FinitePiecewise) -> str:
    """Knots of a polygonal function as ``x,value`` CSV rows."""
    out = io.StringIO()
    out.write("x,value\n")
    for x in b.knots():
        out.write(f"{x:.17g},{b.evaluate(x):.17g}\n")
    return out.getvalue()
