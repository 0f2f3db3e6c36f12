"""Witness families, growth profiles, prime table and the monomial codec."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from ._accel import kernels
from .errors import ParameterError
from .pwcore import (
    Affine, FinitePiecewise, Interval, LazyTrain, Piece, ZERO, dyadic_halfwidth, power_law_train,
)

__all__ = [
    "GrowthProfile", "ONE", "EXP", "DOUBLE_EXP", "poly", "profile_from_name",
    "FamilySpec", "make_train", "sequence_tail_bound",
    "primes", "prime_rank", "Monomial", "PIndex", "monomial_p_index",
    "p_index_to_monomial", "p_index_roundtrip", "polygonal_from_knots",
    "make_cutoff_polygonal", "SPF_LIMIT", "PRIME_INDEX_LIMIT",
]


# --------------------------------------------------------------------------
# growth profiles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthProfile:
    alpha: Callable[[float], float]
    label: str
    nondecreasing: bool = True

    def __call__(self, x):
        return self.alpha(x)

    def check(self, xs=None):
        """Assert alpha >= 1 and monotone on a grid (finite values only)."""
        xs = np.linspace(0.0, 30.0, 1000) if xs is None else np.asarray(xs)
        vals = np.array([self.alpha(float(x)) for x in xs])
        finite = np.isfinite(vals)
        if np.any(vals[finite] < 1.0):
            raise ParameterError(f"profile {self.label} drops below 1")
        if self.nondecreasing and np.any(np.diff(vals[finite]) < 0.0):
            raise ParameterError(f"profile {self.label} is not nondecreasing")
        return True


def _one(x):
    return 1.0


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _double_exp(x):
    try:
        return math.exp(math.exp(x))
    except OverflowError:
        return math.inf


ONE = GrowthProfile(_one, "one")
EXP = GrowthProfile(_exp, "exp")
DOUBLE_EXP = GrowthProfile(_double_exp, "double_exp")


def poly(k: int) -> GrowthProfile:
    """max(1, x**k); the floor keeps the profile >= 1 on [0, 1)."""
    if int(k) != k or k < 1:
        raise ParameterError(f"polynomial degree must be a positive integer, got {k}")
    k = int(k)

    def alpha(x):
        try:
            return max(1.0, float(x) ** k)
        except OverflowError:
            return math.inf

    return GrowthProfile(alpha, f"poly{k}")


def profile_from_name(name: str) -> GrowthProfile:
    name = name.strip()
    if name in ("one", "1"):
        return ONE
    if name == "exp":
        return EXP
    if name in ("double_exp", "exp_exp"):
        return DOUBLE_EXP
    if name.startswith("poly"):
        digits = name[4:].strip("()")
        if digits.isdigit():
            return poly(int(digits))
    raise ParameterError(f"unknown growth profile {name!r}")


# --------------------------------------------------------------------------
# family specs
# --------------------------------------------------------------------------

KINDS = ("triangle", "power", "prime", "smooth", "alpha")


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    p: float | None = None
    j: int | None = None
    profile: str | None = None
    shift: float = 0.0
    start_index: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown family kind {self.kind!r}")
        if not (isinstance(self.shift, (int, float)) and 0.0 <= self.shift < 0.125):
            raise ParameterError(f"shift must lie in [0, 1/8), got {self.shift!r}")
        if int(self.start_index) != self.start_index or self.start_index < 1:
            raise ParameterError(f"start index must be an integer >= 1, got {self.start_index!r}")
        if self.kind == "power" and not (self.p is not None and self.p > 0 and math.isfinite(self.p)):
            raise ParameterError("power family needs p > 0")
        if self.kind == "prime" and not (self.j is not None and int(self.j) == self.j and self.j >= 1):
            raise ParameterError("prime family needs an integer j >= 1")
        if self.kind == "alpha":
            profile_from_name(self.profile or "")

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Parse ``kind[:key=value]...``, e.g. ``triangle:t=0.05:start=3``."""
        parts = [s.strip() for s in text.strip().split(":")]
        kind = parts[0]
        kw: dict = {"kind": kind}
        for part in parts[1:]:
            if "=" not in part:
                raise ParameterError(f"malformed family option {part!r} in {text!r}")
            key, val = (s.strip() for s in part.split("=", 1))
            try:
                if key in ("t", "shift"):
                    kw["shift"] = float(val)
                elif key == "start":
                    kw["start_index"] = int(val)
                elif key == "p":
                    kw["p"] = float(val)
                elif key == "j":
                    kw["j"] = int(val)
                elif key == "profile":
                    kw["profile"] = val
                else:
                    raise ParameterError(f"unknown family option {key!r} in {text!r}")
            except ValueError as exc:
                raise ParameterError(f"bad value for {key!r} in {text!r}") from exc
        return cls(**kw)

    def to_text(self) -> str:
        out = [self.kind]
        if self.kind == "power":
            out.append(f"p={_num(self.p)}")
        elif self.kind == "prime":
            out.append(f"j={self.j}")
        elif self.kind == "alpha":
            out.append(f"profile={self.profile}")
        if self.shift:
            out.append(f"t={_num(self.shift)}")
        if self.start_index != 1:
            out.append(f"start={self.start_index}")
        return ":".join(out)

    def with_start(self, n: int) -> "FamilySpec":
        from dataclasses import replace
        return replace(self, start_index=n)

    def __str__(self):
        return self.to_text()


def _num(x) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _alpha_train(profile: GrowthProfile, shift, start, label):
    def height(m):
        return m * profile(m)

    def halfwidth(m):
        a = profile(m)
        if a == 1.0:
            return dyadic_halfwidth(m, m)
        return math.ldexp(1.0 / (2.0 * m * a), -m)

    def mass(m):
        # height * halfwidth = 2**-(m+1) by construction
        return 2.0 ** -(m + 1)

    def tail(n):
        return 2.0 ** -(n + 1)

    return LazyTrain(
        kind="tent", height=height, halfwidth=halfwidth, tail=tail,
        start_index=start, shift=shift, q=1.0,
        key=("alpha", profile.label, shift, start), lattice=("alpha", profile.label, shift, start),
        growth=None, mass_fn=mass, label=label,
    )


def make_train(spec: FamilySpec | str) -> LazyTrain:
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)
    t, n, label = float(spec.shift), int(spec.start_index), spec.to_text()
    if spec.kind == "triangle":
        return power_law_train(1.0, 1.0, 1.0, t, n, label=label)
    if spec.kind == "power":
        return power_law_train(1.0, spec.p, spec.p, t, n, label=label)
    if spec.kind == "prime":
        p = math.log(primes(spec.j))
        return power_law_train(1.0, p, p, t, n, label=label)
    if spec.kind == "smooth":
        return power_law_train(1.0, 1.0, 1.0, t, n, kind="bump", label=label)
    return _alpha_train(profile_from_name(spec.profile), t, n, label)


def sequence_tail_bound(spec: FamilySpec | str) -> Callable[[int], float]:
    """n -> upper bound on d_X(f_n, 0) for the tail trains f_n of a family.

    The L1 part is the analytic tail bound; the series part vanishes below
    index n (supports start past n - 1), leaving at most 2**(1-n).
    """
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec)

    def bound(n):
        train = make_train(spec.with_start(max(1, n)))
        return train.l1_tail_bound(max(1, n) - 1) + 2.0 ** (1 - n)

    return bound


# --------------------------------------------------------------------------
# primes
# --------------------------------------------------------------------------

SPF_LIMIT = 10 ** 6
PRIME_INDEX_LIMIT = 10 ** 6
# the 10**6-th prime is 15485863
_PRIME_SIEVE_LIMIT = 15_485_864

_lock = threading.Lock()
_tables: dict = {}


def _sieve(limit):
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def _small_tables():
    tab = _tables.get("small")
    if tab is None:
        with _lock:
            tab = _tables.get("small")
            if tab is None:
                spf = kernels.spf_table(SPF_LIMIT)
                plist = np.flatnonzero(spf == np.arange(SPF_LIMIT + 1)).astype(np.int64)
                plist = plist[plist >= 2]
                rank = np.zeros(SPF_LIMIT + 1, dtype=np.int64)
                rank[plist] = np.arange(1, len(plist) + 1)
                tab = (spf, plist, rank)
                _tables["small"] = tab
    return tab


def _big_primes():
    plist = _tables.get("big")
    if plist is None:
        with _lock:
            plist = _tables.get("big")
            if plist is None:
                plist = _sieve(_PRIME_SIEVE_LIMIT)
                _tables["big"] = plist
    return plist


def primes(j: int) -> int:
    """The j-th prime (primes(1) = 2), for 1 <= j <= 10**6."""
    if int(j) != j or j < 1:
        raise ParameterError(f"prime index must be an integer >= 1, got {j!r}")
    if j > PRIME_INDEX_LIMIT:
        raise ParameterError(f"prime index {j} exceeds the table limit {PRIME_INDEX_LIMIT}")
    _, plist, _ = _small_tables()
    if j <= len(plist):
        return int(plist[j - 1])
    return int(_big_primes()[j - 1])


def prime_rank(p: int) -> int:
    """Index i with primes(i) == p."""
    if 2 <= p <= SPF_LIMIT:
        spf, _, rank = _small_tables()
        if spf[p] == p:
            return int(rank[p])
    else:
        big = _big_primes()
        i = int(np.searchsorted(big, p))
        if i < len(big) and big[i] == p:
            return i + 1
    raise ParameterError(f"{p} is not a prime within the table")


# --------------------------------------------------------------------------
# monomials and p-indices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    exponents: tuple

    def __post_init__(self):
        exps = list(self.exponents)
        if any(int(a) != a or a < 0 for a in exps):
            raise ParameterError(f"exponents must be nonnegative integers, got {self.exponents!r}")
        exps = [int(a) for a in exps]
        while exps and exps[-1] == 0:
            exps.pop()
        if not exps:
            raise ParameterError("a monomial needs degree >= 1")
        object.__setattr__(self, "exponents", tuple(exps))

    @property
    def degree(self):
        return sum(self.exponents)

    @property
    def nvars(self):
        return len(self.exponents)

    def __str__(self):
        parts = []
        for i, a in enumerate(self.exponents, start=1):
            if a == 1:
                parts.append(f"x{i}")
            elif a > 1:
                parts.append(f"x{i}^{a}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        exps: dict = {}
        for tok in text.replace("*", " ").split():
            base, caret, power = tok.partition("^")
            if caret and not power.isdigit():
                raise ParameterError(f"bad exponent in {tok!r}")
            if not base.startswith("x") or not base[1:].isdigit():
                raise ParameterError(f"bad monomial factor {tok!r}")
            i = int(base[1:])
            if i < 1:
                raise ParameterError(f"variable index must be >= 1 in {tok!r}")
            exps[i] = exps.get(i, 0) + (int(power) if power else 1)
        if not exps:
            raise ParameterError(f"empty monomial {text!r}")
        vec = [0] * max(exps)
        for i, a in exps.items():
            vec[i - 1] = a
        return cls(tuple(vec))


@dataclass(frozen=True)
class PIndex:
    value: int

    def __post_init__(self):
        if int(self.value) != self.value or self.value < 2:
            raise ParameterError(f"p-index must be an integer >= 2, got {self.value!r}")
        object.__setattr__(self, "value", int(self.value))

    def __int__(self):
        return self.value


def monomial_p_index(m: Monomial) -> PIndex:
    """prod primes(i)**alpha_i as an exact (arbitrary precision) integer."""
    value = 1
    for i, a in enumerate(m.exponents, start=1):
        if a:
            value *= primes(i) ** a
    return PIndex(value)


def p_index_to_monomial(n) -> Monomial:
    """Inverse of :func:`monomial_p_index` by prime factorization."""
    n = int(n.value) if isinstance(n, PIndex) else n
    if int(n) != n or n < 2:
        raise ParameterError(f"p-index must be an integer >= 2, got {n!r}")
    n = int(n)
    exps: dict = {}
    spf, plist, rank = _small_tables()
    x = n
    if x > SPF_LIMIT:
        for p in plist.tolist():
            if p * p > x:
                break
            while x % p == 0:
                exps[p] = exps.get(p, 0) + 1
                x //= p
            if x <= SPF_LIMIT:
                break
        if x > SPF_LIMIT:
            # x has no prime factor <= 10**6 below its square root, so it is prime
            if x > plist[-1] ** 2 and x > _PRIME_SIEVE_LIMIT:
                raise ParameterError(f"prime factor {x} of {n} is beyond the prime table")
            exps[x] = exps.get(x, 0) + 1
            x = 1
    while x > 1:
        p = int(spf[x])
        exps[p] = exps.get(p, 0) + 1
        x //= p
    vec: dict = {prime_rank(p): a for p, a in exps.items()}
    out = [0] * max(vec)
    for i, a in vec.items():
        out[i - 1] = a
    return Monomial(tuple(out))


def p_index_roundtrip(lo: int = 2, hi: int = SPF_LIMIT) -> int:
    """Factor and rebuild every n in [lo, hi]; returns the first failure or 0."""
    if lo < 2 or hi > SPF_LIMIT or lo > hi:
        raise ParameterError(f"round-trip range must lie in [2, {SPF_LIMIT}]")
    spf, plist, rank = _small_tables()
    return int(kernels.codec_roundtrip(int(lo), int(hi), spf, plist, rank))


# --------------------------------------------------------------------------
# polygonal functions and cutoffs
# --------------------------------------------------------------------------

def polygonal_from_knots(xs, ys) -> FinitePiecewise:
    """Continuous polygon through (xs[k], ys[k]); pieces are [x_k, x_{k+1})
    with the last one closed, and the last piece anchored at its right knot so
    the value there is reproduced exactly."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys) or len(xs) < 2:
        raise ParameterError("need at least two knots with one value each")
    if any(b <= a for a, b in zip(xs, xs[1:])) or xs[0] < 0:
        raise ParameterError("knots must be strictly increasing and >= 0")
    pieces = []
    last = len(xs) - 2
    for k in range(len(xs) - 1):
        x0, x1, y0, y1 = xs[k], xs[k + 1], ys[k], ys[k + 1]
        slope = (y1 - y0) / (x1 - x0)
        kind = Affine(slope, y1, x1) if k == last else Affine(slope, y0, x0)
        pieces.append(Piece(Interval(x0, x1, True, k == last), kind))
    return FinitePiecewise(tuple(pieces))


def make_cutoff_polygonal(p: FinitePiecewise, n, gamma) -> FinitePiecewise:
    """p on [0, n], the ramp p(n)*(n + gamma - x)/gamma on (n, n + gamma], 0 beyond."""
    if not (isinstance(gamma, (int, float)) and gamma > 0 and math.isfinite(gamma)):
        raise ParameterError(f"gamma must be > 0, got {gamma!r}")
    if not n > 0:
        raise ParameterError(f"cutoff point must be > 0, got {n!r}")
    n = float(n)
    if any(not isinstance(pc.kind, Affine) for pc in p.pieces):
        raise ParameterError("cutoff needs a polygonal (affine pieces only) function")
    if all(pc.kind.slope == 0.0 and pc.kind.intercept == 0.0 for pc in p.pieces):
        return ZERO
    if not p.pieces or p.pieces[0].support.lo != 0 or p.support_hi < n:
        raise ParameterError("polygon must cover [0, n]")
    for a, b in zip(p.pieces, p.pieces[1:]):
        if a.support.hi != b.support.lo:
            raise ParameterError("polygon pieces must be contiguous")
    pieces = []
    for pc in p.pieces:
        lo, hi = pc.support.lo, pc.support.hi
        if lo >= n:
            break
        if hi >= n:
            pieces.append(Piece(Interval(lo, n, pc.support.closed_lo, True), pc.kind))
            break
        pieces.append(pc)
    pn = pieces[-1].kind.value(n)
    if pn != 0.0:
        # anchored at the far end so the ramp reaches 0 exactly
        ramp = Affine(-pn / gamma, 0.0, n + gamma)
        pieces.append(Piece(Interval(n, n + gamma, False, True), ramp))
    return FinitePiecewise(tuple(pieces))
