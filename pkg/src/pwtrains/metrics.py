"""Norms and metrics: L1, windowed sup norms, d_X, the c0(X) sup metric and
support measures."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, TailBoundError
from ._accel import BUMP
from .pwcore import (
    ZERO, Interval, LazyTrain, _fp_extent, _single_train, _tail_index, cell_stats, cell_table,
    decompose, difference, evaluate, integrate_abs_detail, is_zero, sup_abs,
)

__all__ = [
    "ToleranceConfig", "MetricValue", "l1_norm", "sup_norm_window", "series_depth",
    "sup_profile", "dx_distance", "dc0_distance", "support_tail_measure",
]


@dataclass(frozen=True)
class ToleranceConfig:
    metric_tol: float = 1e-9
    quad_tol: float = 1e-12
    series_tail_tol: float = 1e-12

    def __post_init__(self):
        for name in ("metric_tol", "quad_tol", "series_tail_tol"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be a positive finite real, got {val!r}")

    def scaled(self, factor: float) -> "ToleranceConfig":
        """All tolerances multiplied by ``factor``."""
        return ToleranceConfig(self.metric_tol * factor, self.quad_tol * factor,
                               self.series_tail_tol * factor)

    def to_json(self):
        return asdict(self)


@dataclass(frozen=True)
class MetricValue:
    value: float
    error_bound: float
    truncation_index: int

    @property
    def upper(self):
        return self.value + self.error_bound

    @property
    def lower(self):
        return max(0.0, self.value - self.error_bound)

    def to_json(self):
        return {"value": self.value, "error_bound": self.error_bound,
                "truncation_index": self.truncation_index}


DEFAULT = ToleranceConfig()


def l1_norm(f, cfg: ToleranceConfig = DEFAULT) -> MetricValue:
    """L1 norm on [0, +inf): exact piece integrals up to the index where the
    analytic tail drops below ``series_tail_tol``, plus quadrature for bumps."""
    if is_zero(f):
        return MetricValue(0.0, 0.0, 0)
    value, err, m = integrate_abs_detail(f, Interval(0.0, math.inf), cfg.series_tail_tol,
                                         cfg.quad_tol)
    return MetricValue(value, err, m)


def sup_norm_window(f, n) -> float:
    """max |f| on [0, n]."""
    return sup_abs(f, n)


def series_depth(cfg: ToleranceConfig) -> int:
    """N with 2**-N <= metric_tol / 2."""
    return max(1, math.ceil(math.log2(2.0 / cfg.metric_tol)))


def _profile(h, x1, peak, unresolved, depth):
    out = np.zeros(depth)
    x1 = np.asarray(x1)
    keep = x1 <= depth
    # cells never straddle an integer, so a cell ending at x1 lies in [k-1, k], k = ceil(x1)
    ks = np.ceil(x1[keep]).astype(np.int64)
    np.maximum.at(out, ks - 1, np.asarray(peak)[keep])
    for _m, _pk, c in unresolved:
        k = max(1, math.ceil(c))
        if k <= depth:
            out[k - 1] = max(out[k - 1], abs(evaluate(h, c)))
    out[0] = max(out[0], abs(evaluate(h, 0.0)))
    return np.maximum.accumulate(out)


def sup_profile(h, depth: int) -> np.ndarray:
    """[max |h| on [0, k] for k = 1..depth] from a single cell decomposition."""
    if is_zero(h):
        return np.zeros(depth)
    table = cell_table(h, 0.0, float(depth), breaks=range(1, depth))
    return _profile(h, table.x1, table.peak, table.unresolved, depth)


def _l1_and_profile(h, depth, cfg):
    """L1 norm and sup profile of h, sharing one decomposition when h mixes
    several sources."""
    if _single_train(h) is not None:
        return l1_norm(h, cfg), sup_profile(h, depth)
    m_cut, tail = _tail_index(h, cfg.series_tail_tol)
    hi = max(float(depth), m_cut + 0.5, _fp_extent(h))
    cells = decompose(h, 0.0, hi, breaks=range(1, depth + 1))
    nq = sum(1 for nl in cells.nonlin if any(sg.kind == BUMP for sg in nl))
    peak, l1, err = cell_stats(cells.x0, cells.x1, cells.s, cells.v, cells.nonlin,
                               cfg.quad_tol / max(1, nq))
    bound = math.fsum(err) + tail + math.fsum(u[0] for u in cells.unresolved)
    l1v = MetricValue(math.fsum(l1), bound, m_cut)
    return l1v, _profile(h, cells.x1, peak, cells.unresolved, depth)


def dx_distance(f, g=None, cfg: ToleranceConfig = DEFAULT, depth: Optional[int] = None) -> MetricValue:
    """d_X(f, g) = ||f-g||_1 + sum_k 2**-k s_k/(1+s_k), s_k = max |f-g| on [0,k].

    The series is cut at ``depth`` (default from ``cfg.metric_tol``); every
    dropped term is below 2**-k, so 2**-depth joins the error bound.
    """
    n = series_depth(cfg) if depth is None else int(depth)
    if n < 1:
        raise ParameterError(f"series depth must be >= 1, got {depth}")
    h = f if g is None else difference(f, g)
    if is_zero(h):
        return MetricValue(0.0, 0.0, n)
    l1, sups = _l1_and_profile(h, n, cfg)
    terms = []
    for k, s in enumerate(sups, start=1):
        term = math.ldexp(s / (1.0 + s), -k)
        if not term < math.ldexp(1.0, -k):
            raise AssertionError(f"series term {k} not below 2**-{k}")
        terms.append(term)
    value = l1.value + math.fsum(terms)
    return MetricValue(value, l1.error_bound + math.ldexp(1.0, -n), n)


SeqFn = Callable[[int], object]


def dc0_distance(seq_f: SeqFn, seq_g: Optional[SeqFn] = None, cfg: ToleranceConfig = DEFAULT,
                 monotone_tail: Optional[Callable[[int], float]] = None,
                 max_terms: int = 10000) -> MetricValue:
    """sup_n d_X(f_n, g_n) for sequences indexed from 1.

    ``monotone_tail(n)`` must bound d_X(f_m, g_m) for every m >= n.  Terms are
    computed until that bound falls below the running maximum (or below
    ``metric_tol``), which certifies the supremum.
    """
    if monotone_tail is None:
        raise ParameterError("dc0_distance needs a monotone tail bound for d_X(f_n, g_n)")
    best = 0.0
    worst_err = 0.0
    for n in range(1, max_terms + 1):
        fn = seq_f(n)
        gn = ZERO if seq_g is None else seq_g(n)
        d = dx_distance(fn, gn, cfg)
        best = max(best, d.value)
        worst_err = max(worst_err, d.error_bound)
        rest = monotone_tail(n + 1)
        if rest <= best:
            return MetricValue(best, worst_err, n)
        if rest <= cfg.metric_tol:
            return MetricValue(best, max(worst_err, rest - best), n)
    raise TailBoundError(f"tail bound did not settle within {max_terms} terms")


def support_tail_measure(train: LazyTrain, n: int, max_terms: int = 100000) -> float:
    """Lebesgue measure of the union of the supports of pieces m >= n."""
    if not isinstance(train, LazyTrain):
        raise ParameterError("support_tail_measure needs a train")
    if int(n) != n or n < 0:
        raise ParameterError(f"index must be a nonnegative integer, got {n!r}")
    m = max(int(n), train.start_index)
    if train.lattice[:1] == ("dyadic",):
        # sum_{k >= m} 2**-k
        return math.ldexp(1.0, 1 - m)
    terms = []
    prev = None
    for k in range(m, m + max_terms):
        w = train.halfwidth(k)
        term = 2.0 * float(w)
        terms.append(term)
        if term == 0.0:
            return math.fsum(terms)
        # once consecutive widths at least halve, the rest sums to <= term
        if prev is not None and term <= 0.5 * prev and term <= 1e-18 * terms[0]:
            return math.fsum(terms) + term
        prev = term
    raise TailBoundError("support widths do not decay fast enough to sum")
