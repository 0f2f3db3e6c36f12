"""Piecewise closed-form functions on [0, +inf).

Three function shapes are supported and freely mixed:

* :class:`LazyTrain` -- countably many disjoint pieces centred at ``m + shift``,
  enumerated on demand and equipped with analytic L1 tail bounds;
* :class:`FinitePiecewise` -- finitely many pieces, zero past the last one;
* :class:`CombinedFunction` -- a finite linear combination of the two above.

Integrals and windowed sup-norms are computed on *cells*: the intervals between
consecutive breakpoints of all terms, on each of which every term is a single
closed-form segment.  Cells with at most one non-affine segment are handled in
closed form (or bisection to machine precision for the bump) by the kernels in
:mod:`pwtrains._accel`.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real as _RealABC
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from . import _pykernels as _py
from ._accel import BUMP, INFLECTION, POWER, kernels
from .errors import DomainError, ParameterError, TailBoundError, UnsupportedOperationError

Real = Union[float, Fraction]

AFFINE = 0

__all__ = [
    "Interval", "Affine", "AffinePower", "SmoothBump", "Tent", "Zero", "Piece",
    "LazyTrain", "FinitePiecewise", "CombinedFunction", "ZERO",
    "evaluate", "evaluate_many", "pieces_in", "integrate_abs", "sup_abs",
    "integrate_abs_detail", "decompose", "cell_stats", "cell_table",
    "combine", "linear_combination", "difference", "train_power", "train_product",
    "power_law_train", "terms_of", "is_zero", "BUMP_MASS", "BUMP_MASS_ERR",
]

# integral of the unit bump exp(1 - 1/(1-u^2)) over [-1, 1]
BUMP_MASS, BUMP_MASS_ERR = kernels.bump_integral(-1.0, 1.0, 1e-15)


def _check_x(x):
    if not isinstance(x, _RealABC) or not math.isfinite(x) or x < 0:
        raise DomainError(f"evaluation point must be finite and >= 0, got {x!r}")
    return float(x)


# --------------------------------------------------------------------------
# intervals and piece kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: Real
    hi: Real
    closed_lo: bool = True
    closed_hi: bool = True

    def __post_init__(self):
        if self.lo != self.lo or self.hi != self.hi:
            raise ParameterError("interval endpoints must not be NaN")
        if self.lo < 0:
            raise ParameterError(f"interval must lie in [0, +inf), got lo={self.lo}")
        if self.lo > self.hi:
            raise ParameterError(f"empty interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def is_empty(self):
        return self.lo == self.hi and not (self.closed_lo and self.closed_hi)

    @property
    def bounded(self):
        return math.isfinite(self.hi)

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, x):
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.closed_lo:
            return False
        if x == self.hi and not self.closed_hi:
            return False
        return True

    def intersects(self, other: "Interval"):
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return self.contains(lo) and other.contains(lo)


@dataclass(frozen=True)
class Seg:
    """Kernel encoding of one closed-form segment (see ``_pykernels``)."""
    kind: int
    params: tuple

    def scaled(self, coef):
        p = self.params
        if self.kind == AFFINE:
            return Seg(AFFINE, (coef * p[0], p[1], coef * p[2], 0.0, 0.0))
        return Seg(self.kind, (coef * p[0],) + p[1:])


def _affine_seg(slope, origin, value):
    return Seg(AFFINE, (float(slope), float(origin), float(value), 0.0, 0.0))


@dataclass(frozen=True)
class Affine:
    """x -> slope*(x - origin) + intercept."""
    slope: float
    intercept: float
    origin: float = 0.0

    def value(self, x):
        return self.slope * (x - self.origin) + self.intercept

    def segments(self, lo, hi):
        return [(lo, hi, _affine_seg(self.slope, self.origin, self.intercept))]


@dataclass(frozen=True)
class AffinePower:
    """x -> c*(a*(x - origin) + b)**q, evaluated where the base is >= 0."""
    c: float
    a: float
    b: float
    q: float
    origin: float = 0.0

    def __post_init__(self):
        if not self.q > 0:
            raise ParameterError(f"exponent must be > 0, got {self.q}")

    def value(self, x):
        ell = self.a * (x - self.origin) + self.b
        if ell <= 0.0:
            return 0.0
        return self.c * ell ** self.q

    def segments(self, lo, hi):
        if self.q == 1.0:
            return [(lo, hi, _affine_seg(self.c * self.a, self.origin, self.c * self.b))]
        return [(lo, hi, Seg(POWER, (self.c, self.a, self.origin, self.b, self.q)))]


@dataclass(frozen=True)
class SmoothBump:
    """x -> height*exp(1 - 1/(1 - u^2)), u = (x - center)/halfwidth, zero for |u| >= 1."""
    height: float
    center: float
    halfwidth: float

    def value(self, x):
        return self.height * _py.bump((x - self.center) / self.halfwidth)

    def segments(self, lo, hi):
        c, w = self.center, self.halfwidth
        seg = Seg(BUMP, (self.height, c, w, 0.0, 0.0))
        cuts = [lo, c - INFLECTION * w, c, c + INFLECTION * w, hi]
        return [(a, b, seg) for a, b in zip(cuts, cuts[1:]) if b > a]


@dataclass(frozen=True)
class Tent:
    """Symmetric affine-power tent: height*(1 - |x - center|/halfwidth)**q.

    Its two halves are :class:`AffinePower` segments; ``q = 1`` is the triangle.
    """
    height: float
    center: float
    halfwidth: float
    q: float = 1.0

    def value(self, x):
        return _tent(self.height, self.center, self.halfwidth, self.q, x)

    def halves(self):
        inv = 1.0 / self.halfwidth
        return (AffinePower(self.height, inv, 1.0, self.q, self.center),
                AffinePower(self.height, -inv, 1.0, self.q, self.center))

    def segments(self, lo, hi):
        left, right = self.halves()
        c = self.center
        out = []
        if c > lo:
            out += left.segments(lo, min(c, hi))
        if hi > c:
            out += right.segments(max(c, lo), hi)
        return out


@dataclass(frozen=True)
class Zero:
    def value(self, x):
        return 0.0

    def segments(self, lo, hi):
        return []


PieceKind = Union[Affine, AffinePower, SmoothBump, Tent, Zero]


def _tent(h, c, w, q, x):
    d = abs(x - c)
    if d == 0.0:
        return h
    if w == 0.0:
        return 0.0
    u = d / w
    if u >= 1.0:
        return 0.0
    return h * (1.0 - u) ** q


def _bumpval(h, c, w, x):
    d = abs(x - c)
    if d == 0.0:
        return h
    if w == 0.0:
        return 0.0
    return h * _py.bump(d / w)


@dataclass(frozen=True)
class Piece:
    support: Interval
    kind: PieceKind

    def evaluate(self, x):
        if not self.support.contains(x):
            return 0.0
        return self.kind.value(x)

    def segments(self):
        """Closed-form segments with float endpoints, split at extrema and
        bump inflections."""
        lo, hi = float(self.support.lo), float(self.support.hi)
        if hi <= lo:
            return []
        return self.kind.segments(lo, hi)

    def mass(self):
        """(integral of |piece| over its support, quadrature error)."""
        k = self.kind
        if isinstance(k, Tent):
            return 2.0 * abs(k.height) * float(k.halfwidth) / (k.q + 1.0), 0.0
        if isinstance(k, SmoothBump):
            hw = abs(k.height) * k.halfwidth
            return hw * BUMP_MASS, hw * BUMP_MASS_ERR
        if isinstance(k, Zero):
            return 0.0, 0.0
        fp = FinitePiecewise((self,))
        return integrate_abs(fp, self.support, 1e-14)

    def peak(self):
        k = self.kind
        if isinstance(k, (Tent, SmoothBump)):
            return abs(k.height)
        if isinstance(k, Zero):
            return 0.0
        lo, hi = float(self.support.lo), float(self.support.hi)
        return max(abs(k.value(lo)), abs(k.value(hi)))


# --------------------------------------------------------------------------
# lazy trains
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LazyTrain:
    """Infinite family of disjoint pieces, piece ``m`` centred at ``m + shift``.

    ``height(m)`` and ``halfwidth(m)`` describe piece ``m`` (halfwidths must be
    <= 1/4 so supports stay inside their unit cell); ``tail(N)`` bounds the L1
    mass of all pieces with index > N.  ``halfwidth`` may return a
    :class:`~fractions.Fraction`, in which case supports are exact rationals.

    Trains with ``growth = (scale, exponent)`` have ``height(m) = scale *
    m**exponent`` on the dyadic lattice and are closed under
    :func:`train_power` and :func:`train_product`.
    """
    kind: str
    height: Callable[[int], float]
    halfwidth: Callable[[int], Real]
    tail: Callable[[int], float]
    start_index: int = 1
    shift: float = 0.0
    q: float = 1.0
    key: tuple = ()
    lattice: tuple = ()
    growth: tuple | None = None
    mass_fn: Callable[[int], float] | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("tent", "bump"):
            raise ParameterError(f"unknown train kind {self.kind!r}")
        if self.start_index < 0:
            raise ParameterError("start_index must be >= 0")
        if not (0.0 <= self.shift < 1.0):
            raise ParameterError(f"train shift must lie in [0, 1), got {self.shift}")

    def __eq__(self, other):
        if not isinstance(other, LazyTrain):
            return NotImplemented
        if self.key and other.key:
            return self.key == other.key
        return self is other

    def __hash__(self):
        return hash(self.key) if self.key else id(self)

    def __call__(self, x):
        return evaluate(self, x)

    def center(self, m):
        return m + self.shift

    def piece_at(self, m) -> Piece:
        if m < self.start_index:
            raise ParameterError(f"index {m} below start index {self.start_index}")
        h = float(self.height(m))
        w = self.halfwidth(m)
        c = self.center(m)
        if isinstance(w, Fraction):
            exact = Fraction(c)
            support = Interval(exact - w, exact + w)
        else:
            support = Interval(c - w, c + w)
        if self.kind == "tent":
            return Piece(support, Tent(h, c, float(w), self.q))
        return Piece(support, SmoothBump(h, c, float(w)))

    def mass(self, m):
        """Exact integral of |piece m| (closed form)."""
        if self.mass_fn is not None:
            return self.mass_fn(m)
        h = abs(float(self.height(m)))
        w = float(self.halfwidth(m))
        if self.kind == "tent":
            return 2.0 * h * w / (self.q + 1.0)
        return h * w * BUMP_MASS

    def l1_tail_bound(self, n):
        """Upper bound on the summed L1 mass of every piece with index > n."""
        return self.tail(max(n, self.start_index - 1))

    def sup_tail_profile(self, m):
        return abs(float(self.height(m)))

    def evaluate(self, x):
        m = math.floor(x - self.shift + 0.5)
        if m < self.start_index:
            return 0.0
        c = m + self.shift
        if self.kind == "tent":
            return _tent(float(self.height(m)), c, float(self.halfwidth(m)), self.q, x)
        return _bumpval(float(self.height(m)), c, float(self.halfwidth(m)), x)

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        if xs.size == 0:
            return np.zeros(xs.shape)
        top = int(math.floor(float(xs.max()) - self.shift + 0.5))
        if top < self.start_index:
            return np.zeros(xs.shape)
        heights = np.zeros(top + 1)
        widths = np.ones(top + 1)
        for m in range(self.start_index, top + 1):
            heights[m] = float(self.height(m))
            widths[m] = float(self.halfwidth(m))
        kind = 0 if self.kind == "tent" else 1
        return kernels.train_values(xs, kind, float(self.q), float(self.shift),
                                    int(self.start_index), heights, widths)

    def pieces_in(self, window: Interval):
        if not window.bounded:
            raise ParameterError("pieces_in needs a bounded window")
        first = max(self.start_index, math.ceil(window.lo - self.shift - 0.25))
        last = math.floor(window.hi - self.shift + 0.25)
        out = []
        for m in range(first, last + 1):
            piece = self.piece_at(m)
            if piece.support.intersects(window):
                out.append((m, piece))
        return out

    def translate(self, t):
        """Same train moved right by ``t``."""
        key = self.key[:-2] + (self.shift + t, self.start_index) if self.key else ()
        lattice = self.lattice[:-2] + (self.shift + t, self.start_index) if self.lattice else ()
        return _replace(self, shift=self.shift + t, key=key, lattice=lattice)

    def from_index(self, n):
        """The tail train sum_{m >= n} of the same pieces."""
        n = max(n, self.start_index)
        key = self.key[:-1] + (n,) if self.key else ()
        lattice = self.lattice[:-1] + (n,) if self.lattice else ()
        return _replace(self, start_index=n, key=key, lattice=lattice)


def _replace(train, **changes):
    from dataclasses import replace
    return replace(train, **changes)


def _power_law_tail(k, expo, n):
    """Bound sum_{m > n} k * m**expo / 2**m for n >= 0."""
    if k == 0.0:
        return 0.0
    if expo == 0.0:
        return k * 2.0 ** -n
    if expo == 1.0:
        # sum_{m>n} m x^m at x = 1/2
        return k * (n + 2) * 2.0 ** -n
    total = 0.0
    m = n + 1
    # ratio of consecutive terms ((m+1)/m)**expo / 2 decreases in m
    while True:
        ratio = ((m + 1) / m) ** expo / 2.0
        term = k * m ** expo * 2.0 ** -m
        if ratio < 0.75:
            return total + term / (1.0 - ratio)
        total += term
        m += 1
        if m > n + 100000:
            raise TailBoundError("power-law tail did not settle")


# Past this index a support is far below one ulp of its center, so the exact
# rational halfwidth buys nothing and its size grows linearly with m.
EXACT_INDEX_LIMIT = 2048


def dyadic_halfwidth(m, scale=1):
    """``1/(scale * 2**(m+1))``: exact Fraction up to EXACT_INDEX_LIMIT, float beyond."""
    if m < EXACT_INDEX_LIMIT:
        return Fraction(1, scale * 2 ** (m + 1))
    return math.ldexp(1.0 / scale, -(m + 1))


def power_law_train(scale, exponent, q=1.0, shift=0.0, start=1, kind="tent", label=""):
    """Train on the dyadic lattice: piece m has height ``scale*m**exponent``
    and support ``[m + shift - 2**-(m+1), m + shift + 2**-(m+1)]``."""
    scale = float(scale)
    exponent = float(exponent)
    q = float(q)
    if kind == "tent":
        k = abs(scale) / (q + 1.0)
    else:
        k = abs(scale) * (BUMP_MASS + BUMP_MASS_ERR) / 2.0

    def height(m):
        return scale * m ** exponent

    def halfwidth(m):
        return dyadic_halfwidth(m)

    def tail(n):
        return _power_law_tail(k, exponent, n)

    return LazyTrain(
        kind=kind, height=height, halfwidth=halfwidth, tail=tail,
        start_index=start, shift=float(shift), q=q if kind == "tent" else 1.0,
        key=(kind, "dyadic", scale, exponent, q, float(shift), start),
        lattice=("dyadic", float(shift), start),
        growth=(scale, exponent), label=label,
    )


# --------------------------------------------------------------------------
# finite piecewise functions and combinations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FinitePiecewise:
    pieces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for a, b in zip(self.pieces, self.pieces[1:]):
            sa, sb = a.support, b.support
            if sa.hi > sb.lo or (sa.hi == sb.lo and sa.closed_hi and sb.closed_lo
                                 and not (sa.is_empty or sb.is_empty)):
                raise ParameterError("piece supports must be sorted and pairwise disjoint")
        object.__setattr__(self, "_los", [p.support.lo for p in self.pieces])

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def support_hi(self):
        return self.pieces[-1].support.hi if self.pieces else 0.0

    def evaluate(self, x):
        i = bisect.bisect_right(self._los, x) - 1
        # a point may sit on the open end of one piece and the closed start of the next
        for j in (i, i - 1):
            if 0 <= j < len(self.pieces) and self.pieces[j].support.contains(x):
                return self.pieces[j].kind.value(x)
        return 0.0

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        flat = xs.ravel()
        out = np.zeros(flat.shape)
        if not self.pieces or flat.size == 0:
            return out.reshape(xs.shape)
        if all(isinstance(p.kind, Affine) for p in self.pieces):
            table = self._affine_table()
            los, his, sl, org, icp = table
            idx = np.searchsorted(los, flat, side="right") - 1
            ok = idx >= 0
            j = np.where(ok, idx, 0)
            inside = ok & (flat < his[j])
            out[inside] = sl[j[inside]] * (flat[inside] - org[j[inside]]) + icp[j[inside]]
            # boundary points (closed ends, gaps) take the exact scalar path
            edge = ~inside & ok & (flat <= his[j])
            for k in np.flatnonzero(edge | (~ok & (flat >= 0))):
                out[k] = self.evaluate(float(flat[k]))
            return out.reshape(xs.shape)
        for k, x in enumerate(flat):
            out[k] = self.evaluate(float(x))
        return out.reshape(xs.shape)

    def _affine_table(self):
        table = self.__dict__.get("_aff")
        if table is None:
            table = (
                np.array([float(p.support.lo) for p in self.pieces]),
                np.array([float(p.support.hi) for p in self.pieces]),
                np.array([p.kind.slope for p in self.pieces]),
                np.array([p.kind.origin for p in self.pieces]),
                np.array([p.kind.intercept for p in self.pieces]),
            )
            object.__setattr__(self, "_aff", table)
        return table

    def segment_list(self):
        """(starts, [(a, b, seg)]) over all pieces, computed once."""
        cached = self.__dict__.get("_segs")
        if cached is None:
            segs = []
            for p in self.pieces:
                segs.extend(p.segments())
            cached = ([a for a, _, _ in segs], segs)
            object.__setattr__(self, "_segs", cached)
        return cached

    def pieces_in(self, window: Interval):
        return [(i, p) for i, p in enumerate(self.pieces) if p.support.intersects(window)]

    def knots(self):
        """Sorted support endpoints (the polygonal knots for affine pieces)."""
        pts = sorted({float(p.support.lo) for p in self.pieces}
                     | {float(p.support.hi) for p in self.pieces})
        return pts


ZERO = FinitePiecewise(())

Source = Union[LazyTrain, FinitePiecewise]


@dataclass(frozen=True)
class CombinedFunction:
    terms: tuple = ()
    labels: tuple = ()

    def __call__(self, x):
        return evaluate(self, x)

    def evaluate(self, x):
        total = 0.0
        for c, src in self.terms:
            total += c * src.evaluate(x)
        return total

    def evaluate_many(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        out = np.zeros(xs.shape)
        for c, src in self.terms:
            out += c * src.evaluate_many(xs)
        return out


Function = Union[LazyTrain, FinitePiecewise, CombinedFunction]


def terms_of(f) -> list:
    """Flatten ``f`` into ``[(coef, source)]`` with equal sources merged and
    zero coefficients dropped."""
    if isinstance(f, CombinedFunction):
        raw = list(f.terms)
    elif isinstance(f, (LazyTrain, FinitePiecewise)):
        raw = [(1.0, f)]
    else:
        raise UnsupportedOperationError(f"not a piecewise function: {type(f).__name__}")
    merged: list = []
    for c, src in raw:
        if isinstance(src, FinitePiecewise) and not src.pieces:
            continue
        for i, (c0, s0) in enumerate(merged):
            if s0 == src:
                merged[i] = (c0 + c, s0)
                break
        else:
            merged.append((float(c), src))
    return [(c, s) for c, s in merged if c != 0.0]


def is_zero(f):
    """Structural zero test (no nonzero terms left after merging)."""
    return not terms_of(f)


def linear_combination(pairs: Iterable, labels=()) -> CombinedFunction:
    """Sum of ``coef * f`` over pairs; nested combinations are flattened."""
    raw = []
    for c, f in pairs:
        for c2, src in terms_of(f):
            raw.append((float(c) * c2, src))
    return CombinedFunction(tuple(terms_of(CombinedFunction(tuple(raw)))), tuple(labels))


def combine(terms: Sequence) -> CombinedFunction:
    """Finite linear combination of shifted trains (and finite pieces)."""
    terms = list(terms)
    if not terms:
        raise ParameterError("combine needs at least one term; use ZERO for the zero function")
    labels = []
    for c, f in terms:
        if not isinstance(c, _RealABC) or not math.isfinite(c):
            raise ParameterError(f"coefficient must be a finite real, got {c!r}")
        if isinstance(f, LazyTrain) and not 0.0 <= f.shift < 0.125:
            raise ParameterError(f"train shift must lie in [0, 1/8), got {f.shift}")
        labels.append(getattr(f, "label", "") or type(f).__name__)
    return linear_combination(terms, labels)


def difference(f, g) -> CombinedFunction:
    return linear_combination([(1.0, f), (-1.0, g)])


def evaluate(f, x) -> float:
    x = _check_x(x)
    if isinstance(f, (LazyTrain, FinitePiecewise, CombinedFunction)):
        return f.evaluate(x)
    if isinstance(f, Piece):
        return f.evaluate(x)
    raise UnsupportedOperationError(f"cannot evaluate {type(f).__name__}")


def evaluate_many(f, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size and (not np.all(np.isfinite(xs)) or xs.min() < 0):
        raise DomainError("evaluation points must be finite and >= 0")
    return f.evaluate_many(xs)


def pieces_in(f: LazyTrain, window: Interval):
    return f.pieces_in(window)


# --------------------------------------------------------------------------
# power / product algebra on the dyadic lattice
# --------------------------------------------------------------------------

def _require_power_law(f):
    if not isinstance(f, LazyTrain) or f.kind != "tent" or f.growth is None:
        raise UnsupportedOperationError(
            "closed-form powers/products need power-law tent trains on the dyadic lattice")


def train_power(f: LazyTrain, r) -> LazyTrain:
    """Pointwise r-th power: piece m becomes height**r * (...)**(q*r)."""
    if not r > 0:
        raise ParameterError(f"power must be > 0, got {r}")
    _require_power_law(f)
    scale, expo = f.growth
    if scale < 0:
        raise UnsupportedOperationError("real powers of negative pieces are not defined")
    return power_law_train(scale ** r, expo * r, f.q * r, f.shift, f.start_index,
                           label=f"({f.label})^{r:g}")


def train_product(fs: Sequence[LazyTrain], exponents: Sequence[int]) -> LazyTrain:
    """Pointwise product of powers of trains sharing one lattice; exponents add."""
    fs = list(fs)
    exponents = list(exponents)
    if len(fs) != len(exponents) or not fs:
        raise ParameterError("need one exponent per train")
    if any(int(a) != a or a < 0 for a in exponents) or not any(exponents):
        raise ParameterError("exponents must be nonnegative integers, not all zero")
    for f in fs:
        _require_power_law(f)
    if len({f.lattice for f in fs}) != 1:
        raise UnsupportedOperationError("trains live on different support lattices")
    scale, expo, q = 1.0, 0.0, 0.0
    for f, a in zip(fs, exponents):
        if a == 0:
            continue
        s, e = f.growth
        scale *= s ** a
        expo += a * e
        q += a * f.q
    head = fs[0]
    return power_law_train(scale, expo, q, head.shift, head.start_index,
                           label="*".join(f"({f.label})^{a}" for f, a in zip(fs, exponents) if a))


# --------------------------------------------------------------------------
# cell decomposition: exact sup norms and L1 integrals
# --------------------------------------------------------------------------

@dataclass
class CellTable:
    x0: np.ndarray
    x1: np.ndarray
    peak: np.ndarray
    l1: np.ndarray
    err: np.ndarray
    # (|coef| * mass, |coef| * peak, center) of pieces whose support is not
    # representable in binary64 and therefore not resolved into cells
    unresolved: list = field(default_factory=list)


def _resolvable(piece: Piece):
    s = piece.support
    return (Fraction(float(s.lo)) == Fraction(s.lo) and Fraction(float(s.hi)) == Fraction(s.hi)
            and float(s.hi) > float(s.lo))


def _term_segments(src, lo, hi, unresolved, coef):
    """Unscaled segments of one source clipped to [lo, hi], sorted by start."""
    if isinstance(src, FinitePiecewise):
        starts, allsegs = src.segment_list()
        i = max(0, bisect.bisect_right(starts, lo) - 1)
        j = bisect.bisect_left(starts, hi)
        segs = []
        for a, b, seg in allsegs[i:j]:
            a, b = max(a, lo), min(b, hi)
            if b > a:
                segs.append((a, b, seg))
        return segs
    segs = []
    for _, piece in src.pieces_in(Interval(lo, hi)):
        if not _resolvable(piece):
            m, _e = piece.mass()
            unresolved.append((abs(coef) * m, abs(coef) * piece.peak(), piece.kind.center))
            continue
        for a, b, seg in piece.segments():
            a, b = max(a, lo), min(b, hi)
            if b > a:
                segs.append((a, b, seg))
    return segs


def _generic_cell(nonlin, s, v, x0, x1, quad_tol):
    """Several non-affine segments share the cell: locate stationary points and
    sign changes by a 64-point scan refined with Brent's method."""
    def g(x):
        return sum(_py._seg_value(sg.kind, sg.params, x) for sg in nonlin) + s * (x - x0) + v

    def dg(x):
        total = s
        for sg in nonlin:
            if sg.kind == POWER:
                c, a, o, b, q = sg.params
                ell = a * (x - o) + b
                if ell > 0.0:
                    total += c * q * a * ell ** (q - 1.0)
            else:
                h, o, w = sg.params[:3]
                total += h / w * _py.bump_d1((x - o) / w)
        return total

    n = 64
    grid = [x0 + (x1 - x0) * (i + 0.5) / n for i in range(n)]
    dvals = [dg(x) for x in grid]
    pts = [x0]
    for a, b, da, db in zip(grid, grid[1:], dvals, dvals[1:]):
        if da == 0.0:
            pts.append(a)
        elif da * db < 0.0:
            pts.append(brentq(dg, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps))
    pts.append(x1)
    pts = sorted(set(pts))
    gs = [g(x) for x in pts]
    peak = max(abs(t) for t in gs)
    bounds = [pts[0]]
    for i in range(len(pts) - 1):
        if gs[i] * gs[i + 1] < 0.0:
            bounds.append(brentq(g, pts[i], pts[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps))
        bounds.append(pts[i + 1])
    l1 = 0.0
    err = 0.0
    for a, b in zip(bounds, bounds[1:]):
        if b <= a:
            continue
        total = (b - a) * (s * (0.5 * (a + b) - x0) + v)
        for sg in nonlin:
            val, e = _py._signed_integral(sg.kind, sg.params, 0.0, 0.0, x0, a, b, quad_tol)
            total += val
            err += e
        l1 += abs(total)
    return peak, l1, err


@dataclass
class Cells:
    """Cell decomposition of a function on a window.

    On cell ``i`` the function equals ``s[i]*(x - x0[i]) + v[i]`` plus the
    non-affine segments ``nonlin[i]``.
    """
    x0: list
    x1: list
    s: list
    v: list
    nonlin: list
    unresolved: list = field(default_factory=list)

    def __len__(self):
        return len(self.x0)


def decompose(f, lo, hi, breaks=()) -> Cells:
    lo, hi = float(lo), float(hi)
    unresolved: list = []
    terms = terms_of(f)
    per_term = [_term_segments(src, lo, hi, unresolved, c) for c, src in terms]
    coefs = [c for c, _ in terms]
    pts = {lo, hi}
    for segs in per_term:
        for a, b, _ in segs:
            pts.add(a)
            pts.add(b)
    pts.update(float(k) for k in breaks if lo < k < hi)
    pts = sorted(pts)
    starts = [[a for a, _, _ in segs] for segs in per_term]
    out = Cells([], [], [], [], [], unresolved)
    for x0, x1 in zip(pts, pts[1:]):
        if x1 <= x0:
            continue
        mid = 0.5 * (x0 + x1)
        s = 0.0
        v = 0.0
        nonlin = []
        for segs, st, c in zip(per_term, starts, coefs):
            j = bisect.bisect_right(st, mid) - 1
            if j < 0 or segs[j][1] <= mid:
                continue
            seg = segs[j][2]
            if seg.kind == AFFINE:
                sl, o, val = seg.params[:3]
                s += c * sl
                v += c * (sl * (x0 - o) + val)
            else:
                nonlin.append(seg.scaled(c))
        out.x0.append(x0)
        out.x1.append(x1)
        out.s.append(s)
        out.v.append(v)
        out.nonlin.append(nonlin)
    return out


def cell_stats(x0s, x1s, ss, vs, nonlins, quad_tol):
    """Per cell (max |g|, integral of |g|, quadrature error) for
    g = s*(x - x0) + v + sum(nonlin) on [x0, x1]."""
    n = len(x0s)
    peak = np.zeros(n)
    l1 = np.zeros(n)
    err = np.zeros(n)
    single_idx, generic = [], []
    for k in range(n):
        nl = nonlins[k]
        if not nl:
            x0, x1, s, v = x0s[k], x1s[k], ss[k], vs[k]
            y0, y1 = v, v + s * (x1 - x0)
            peak[k] = max(abs(y0), abs(y1))
            length = x1 - x0
            if y0 * y1 < 0.0:
                r = y0 / (y0 - y1) * length
                l1[k] = 0.5 * (abs(y0) * r + abs(y1) * (length - r))
            else:
                l1[k] = 0.5 * (abs(y0) + abs(y1)) * length
        elif len(nl) == 1:
            single_idx.append(k)
        else:
            generic.append(k)
    if single_idx:
        idx = np.array(single_idx)
        kinds = np.array([nonlins[k][0].kind for k in single_idx], dtype=np.int64)
        params = np.array([nonlins[k][0].params for k in single_idx], dtype=np.float64)
        pk, li, er = kernels.segment_stats(
            kinds, params, np.asarray(ss, dtype=np.float64)[idx],
            np.asarray(vs, dtype=np.float64)[idx], np.asarray(x0s, dtype=np.float64)[idx],
            np.asarray(x1s, dtype=np.float64)[idx], quad_tol)
        peak[idx] = pk
        l1[idx] = li
        err[idx] = er
    for k in generic:
        peak[k], l1[k], err[k] = _generic_cell(nonlins[k], ss[k], vs[k], x0s[k], x1s[k], quad_tol)
    return peak, l1, err


def cell_table(f, lo, hi, breaks=(), quad_tol=1e-12, total_quad_tol=None) -> CellTable:
    """Decompose ``f`` on ``[lo, hi]`` into cells and compute per-cell max |f|,
    integral of |f| and quadrature error.  With ``total_quad_tol`` the
    quadrature budget is shared evenly by the cells that need quadrature."""
    cells = decompose(f, lo, hi, breaks)
    if total_quad_tol is not None:
        nq = sum(1 for nl in cells.nonlin if any(sg.kind == BUMP for sg in nl))
        quad_tol = total_quad_tol / max(1, nq)
    peak, l1, err = cell_stats(cells.x0, cells.x1, cells.s, cells.v, cells.nonlin, quad_tol)
    return CellTable(np.array(cells.x0), np.array(cells.x1), peak, l1, err, cells.unresolved)


def _fp_extent(f):
    return max([float(src.support_hi) for _, src in terms_of(f)
                if isinstance(src, FinitePiecewise)] + [0.0])


def _tail_index(f, tol, max_index=4096):
    """Smallest M with sum |c| * tail(M) <= tol over train terms; (M, tail)."""
    trains = [(abs(c), src) for c, src in terms_of(f) if isinstance(src, LazyTrain)]
    if not trains:
        return 0, 0.0
    for m in range(0, max_index + 1):
        t = sum(c * src.l1_tail_bound(m) for c, src in trains)
        if t <= tol:
            return m, t
    raise TailBoundError(f"tail bound stays above {tol} up to index {max_index}")


def _single_train(f):
    terms = terms_of(f)
    if len(terms) == 1 and isinstance(terms[0][1], LazyTrain):
        return terms[0]
    return None


def integrate_abs(f, window: Interval, tol) -> tuple:
    """Integral of |f| over ``window`` as ``(value, error_bound)``.

    Affine and affine-power segments are integrated in closed form; bumps use
    adaptive Gauss-Kronrod quadrature sharing a budget of tol/2.  Unbounded
    windows are truncated where the analytic tail bounds drop below tol/2.
    ``tol == 0`` is accepted only when the result needs neither quadrature nor
    a tail bound.
    """
    if not isinstance(tol, _RealABC) or tol != tol or tol < 0:
        raise ParameterError(f"tol must be >= 0, got {tol!r}")
    if tol == 0:
        value, err, _ = integrate_abs_detail(f, window, 0.0, 0.0)
        return value, err
    value, err, _ = integrate_abs_detail(f, window, tol / 2.0, tol / 2.0)
    return value, err


def _has_bump(f):
    return any(isinstance(src, LazyTrain) and src.kind == "bump"
               or isinstance(src, FinitePiecewise)
               and any(isinstance(p.kind, SmoothBump) for p in src.pieces)
               for _, src in terms_of(f))


def integrate_abs_detail(f, window: Interval, tail_tol, quad_tol) -> tuple:
    """``(value, error_bound, truncation_index)`` with separate budgets for the
    analytic tail and for quadrature."""
    if isinstance(f, Piece):
        if window.contains(float(f.support.lo)) and window.contains(float(f.support.hi)):
            val, err = f.mass()
            if quad_tol == 0 and err:
                raise ParameterError("tol must be > 0 when quadrature is needed")
            return val, err, 0
        f = FinitePiecewise((f,))
    has_train = any(isinstance(src, LazyTrain) for _, src in terms_of(f))
    if (quad_tol == 0 and _has_bump(f)) or (tail_tol == 0 and has_train and not window.bounded):
        raise ParameterError("tol must be > 0 for quadrature or unbounded windows")
    lo = float(window.lo)
    tail = 0.0
    m_cut = 0
    if window.bounded:
        hi = float(window.hi)
    else:
        single = _single_train(f)
        if single is not None:
            c, train = single
            first = train.piece_at(train.start_index).support.lo
            if lo <= first:
                m_cut, tail = _tail_index(f, tail_tol)
                masses = [train.mass(m) for m in range(train.start_index, m_cut + 1)]
                val = abs(c) * math.fsum(masses)
                err = abs(c) * tail
                if train.kind == "bump":
                    err += val * BUMP_MASS_ERR / BUMP_MASS
                return val, err, m_cut
        m_cut, tail = _tail_index(f, tail_tol)
        hi = max(lo, m_cut + 0.5, _fp_extent(f))
    if hi <= lo:
        return 0.0, tail, m_cut
    table = cell_table(f, lo, hi, total_quad_tol=quad_tol if quad_tol > 0 else 1e-300)
    value = math.fsum(table.l1)
    err = math.fsum(table.err) + tail + math.fsum(u[0] for u in table.unresolved)
    return value, err, m_cut


def sup_abs(f, n) -> float:
    """Exact max of |f| on [0, n]."""
    if not n >= 0 or not math.isfinite(n):
        raise ParameterError(f"window end must be finite and >= 0, got {n}")
    if n == 0:
        return abs(evaluate(f, 0.0))
    if is_zero(f):
        return 0.0
    table = cell_table(f, 0.0, float(n))
    best = float(table.peak.max()) if table.peak.size else 0.0
    for _m, _pk, c in table.unresolved:
        if c <= n:
            best = max(best, abs(evaluate(f, c)))
    return max(best, abs(evaluate(f, float(n))), abs(evaluate(f, 0.0)))
