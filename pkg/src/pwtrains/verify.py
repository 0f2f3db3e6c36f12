"""Verification suite: every computable claim about the witness families is
checked as a finite certified inequality and recorded in a :class:`Report`."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from ._jsonio import dumps
from .approx import bump_perturb, polygonal_approximant, sequence_approximant
from .errors import ParameterError, PwTrainsError
from .families import (
    DOUBLE_EXP, EXP, ONE, FamilySpec, GrowthProfile, Monomial, make_train,
    monomial_p_index, poly, sequence_tail_bound,
)
from .metrics import (
    DEFAULT, ToleranceConfig, dc0_distance, dx_distance, l1_norm, support_tail_measure,
)
from .pwcore import (
    ZERO, combine, evaluate, evaluate_many, linear_combination, train_product,
)

__all__ = [
    "Detail", "CheckResult", "Report", "check_l1_closed_forms", "check_independence_witness",
    "check_combination_growth", "check_monomial_identity", "check_algebraic_growth",
    "algebraic_threshold", "check_sequence_convergence", "check_almost_uniform",
    "refute_uniform_ae", "superlevel_interval", "check_growth_alpha", "check_smooth_family",
    "check_approximants", "run_all", "SUITES",
]

_OPS: dict = {
    "<=": lambda v, b: v <= b,
    "<": lambda v, b: v < b,
    ">=": lambda v, b: v >= b,
    ">": lambda v, b: v > b,
    "==": lambda v, b: v == b,
}


@dataclass(frozen=True)
class Detail:
    description: str
    value: object
    bound: object
    relation: str = "<="

    @property
    def ok(self):
        return bool(_OPS[self.relation](self.value, self.bound))

    def to_json(self):
        return {"description": self.description, "value": _plain(self.value),
                "bound": _plain(self.bound), "relation": self.relation}


def _plain(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


@dataclass
class CheckResult:
    name: str
    paper_anchor: str
    details: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self):
        return self.error is None and all(d.ok for d in self.details)

    def add(self, description, value, bound, relation="<="):
        self.details.append(Detail(description, value, bound, relation))
        return self

    def to_json(self):
        out = {"name": self.name, "passed": self.passed, "paper_anchor": self.paper_anchor,
               "details": [d.to_json() for d in self.details]}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class Report:
    results: list
    config: ToleranceConfig
    seed: int
    timestamp: Optional[str] = None

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def to_json(self, include_timestamp: bool = False):
        out = {"version": __version__, "config": self.config.to_json(), "seed": self.seed,
               "results": [r.to_json() for r in self.results]}
        if include_timestamp and self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out

    def dumps(self) -> str:
        return dumps(self.to_json()) + "\n"


# --------------------------------------------------------------------------
# L1 closed forms
# --------------------------------------------------------------------------

def _ratio_tail(k, expo, n):
    """sum_{m > n} k * m**expo / 2**m bounded by a geometric majorant."""
    m = n + 1
    ratio = ((m + 1) / m) ** expo / 2.0
    if ratio >= 1.0:
        raise ParameterError("ratio bound needs a larger starting index")
    return k * m ** expo * 2.0 ** -m / (1.0 - ratio)


def check_l1_closed_forms(cfg: ToleranceConfig = DEFAULT, max_n: int = 40) -> CheckResult:
    res = CheckResult("l1_closed_forms", "triangle-train L1 series sum n/2^(n+1)")
    f = make_train("triangle")
    v = l1_norm(f, cfg)
    res.add("|l1(f) - 1|", abs(v.value - 1.0), 1e-10)
    for n in range(1, max_n + 1):
        v = l1_norm(make_train(FamilySpec("triangle", start_index=n)), cfg)
        exact = (n + 1) / 2.0 ** n
        res.add(f"|l1(f_{n}) - (n+1)/2^n|", abs(v.value - exact), 1e-10)
    for label, p in (("log 2", math.log(2)), ("log 3", math.log(3)), ("2", 2.0)):
        g = make_train(FamilySpec("power", p=p))
        v = l1_norm(g, cfg)
        partial = math.fsum(n ** p / 2.0 ** n for n in range(1, 61))
        bound = partial + _ratio_tail(1.0, p, 60)
        res.add(f"l1(g_{label}) <= sum n^p/2^n", v.value + v.error_bound, bound)
        # each tent has area n^p / (2^n (p+1))
        oracle = math.fsum(n ** p / (2.0 ** n * (p + 1)) for n in range(1, 61)) \
            + _ratio_tail(1.0 / (p + 1), p, 60)
        res.add(f"|l1(g_{label}) - term sum|", abs(v.value - oracle), 1e-10)
    return res


# --------------------------------------------------------------------------
# translated families: independence and growth of combinations
# --------------------------------------------------------------------------

def _check_shifts(ts, allow_single=False):
    ts = [float(t) for t in ts]
    if len(ts) < (1 if allow_single else 2):
        raise ParameterError("need at least two shifts")
    if any(not 0.0 <= t < 0.125 for t in ts):
        raise ParameterError("shifts must lie in [0, 1/8)")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ParameterError("shifts must be strictly increasing (duplicates are not independent)")
    return ts


def _gap_index(ts):
    """Least N >= 0 with every gap between distinct shifts > 2**-N."""
    if len(ts) < 2:
        return 0
    gap = min(b - a for a, b in zip(ts, ts[1:]))
    n = 0
    while not gap > math.ldexp(1.0, -n):
        n += 1
    return n


def check_independence_witness(ts: Sequence[float]) -> CheckResult:
    ts = _check_shifts(ts)
    res = CheckResult("independence_witness", "translated triangle trains, witness point x0")
    trains = [make_train(FamilySpec("triangle", shift=t)) for t in ts]
    x0 = 0.75 + 0.5 * (ts[0] + ts[1])
    res.add("x0 inside (3/4 + t1, 3/4 + t2)", int(0.75 + ts[0] < x0 < 0.75 + ts[1]), 1, "==")
    res.add("f_t1(x0) != 0", evaluate(trains[0], x0), 0.0, ">")
    for i, tr in enumerate(trains[1:], start=2):
        res.add(f"f_t{i}(x0) == 0", evaluate(tr, x0), 0.0, "==")
    # any distinguished index s: at x = n + t_s (n > N) only f_ts is nonzero
    big_n = _gap_index(ts)
    for s, ts_ in enumerate(ts):
        x = (big_n + 1) + ts_
        vals = [evaluate(tr, x) for tr in trains]
        res.add(f"f_t{s + 1}({big_n + 1}+t{s + 1}) != 0", vals[s], 0.0, ">")
        others = max((abs(v) for i, v in enumerate(vals) if i != s), default=0.0)
        res.add(f"other terms vanish at {big_n + 1}+t{s + 1}", others, 0.0, "==")
    return res


def check_combination_growth(coefs: Sequence[float], ts: Sequence[float],
                             count: int = 20) -> CheckResult:
    if len(coefs) != len(ts) or not coefs:
        raise ParameterError("need one coefficient per shift")
    pairs = sorted(zip((float(t) for t in ts), (float(c) for c in coefs)))
    ts_sorted = _check_shifts([t for t, _ in pairs], allow_single=True)
    cs = [c for _, c in pairs]
    if all(c == 0.0 for c in cs):
        raise ParameterError("all coefficients are zero")
    if cs[-1] == 0.0:
        raise ParameterError("the coefficient of the largest shift must be nonzero")
    res = CheckResult("combination_growth", "combination of translates grows like |c_s| n")
    h = combine([(c, make_train(FamilySpec("triangle", shift=t))) for t, c in pairs])
    big_n = _gap_index(ts_sorted)
    res.add("N from min gap > 2^-N", big_n, 0, ">=")
    for n in range(big_n + 1, big_n + count + 1):
        x = n + ts_sorted[-1]
        res.add(f"|h({n}+t_s)| == |c_s| {n}", abs(evaluate(h, x)), abs(cs[-1]) * n, "==")
    return res


# --------------------------------------------------------------------------
# algebra: monomials of prime trains
# --------------------------------------------------------------------------

def _prime_trains(s):
    return [make_train(FamilySpec("prime", j=j)) for j in range(1, s + 1)]


def _monomial_train(m: Monomial):
    return train_product(_prime_trains(m.nvars), list(m.exponents))


def check_monomial_identity(m: Monomial, grid: int = 1000) -> CheckResult:
    res = CheckResult(f"monomial_identity[{m}]", "monomial in prime trains equals power train")
    ind = monomial_p_index(m).value
    lhs = _monomial_train(m)
    rhs = make_train(FamilySpec("power", p=math.log(ind)))
    xs = np.linspace(0.5, 20.5, grid)
    a = evaluate_many(lhs, xs)
    b = evaluate_many(rhs, xs)
    scale = np.maximum(np.abs(a), np.abs(b))
    live = scale > 0
    rel = float(np.max(np.abs(a - b)[live] / scale[live])) if live.any() else 0.0
    res.add("sup relative grid difference", rel, 1e-9)
    worst = 0.0
    for n in range(1, 21):
        exact = n ** math.log(ind)
        worst = max(worst, abs(evaluate(lhs, float(n)) - exact) / exact)
    res.add("apex values vs n^log(ind) (relative)", worst, 1e-12)
    return res


def algebraic_threshold(poly_terms):
    """(e*, lambda*, n*) for the apex values F(n) = sum lambda_i n^{e_i}.

    n* is the least integer with L n^{e2} <= |lambda*| n^{e*} / 2, where
    L = sum of the other |lambda_i| and e2 the largest other exponent.
    """
    live = [(float(lam), math.log(monomial_p_index(m).value)) for lam, m in poly_terms if lam != 0]
    if not live:
        raise ParameterError("all coefficients are zero")
    lam_star, e_star = max(live, key=lambda t: t[1])
    others = [(lam, e) for lam, e in live if e != e_star]
    if not others:
        return e_star, lam_star, 1
    big_l = math.fsum(abs(lam) for lam, _ in others)
    e2 = max(e for _, e in others)
    n_star = math.ceil((2.0 * big_l / abs(lam_star)) ** (1.0 / (e_star - e2)))
    return e_star, lam_star, max(1, n_star)


def check_algebraic_growth(poly_terms, extra: int = 20) -> CheckResult:
    mons = [m for _, m in poly_terms]
    if len(set(mons)) != len(mons):
        raise ParameterError("duplicate monomials; merge them first")
    res = CheckResult("algebraic_growth", "apex values of a polynomial in prime trains diverge")
    inds = [monomial_p_index(m).value for m in mons]
    res.add("p-indices pairwise distinct", len(set(inds)), len(inds), "==")
    e_star, lam_star, n_star = algebraic_threshold(poly_terms)
    res.add("threshold n*", n_star, 1, ">=")
    h = linear_combination([(lam, _monomial_train(m)) for lam, m in poly_terms if lam != 0])
    ns = list(range(n_star, n_star + extra + 1)) + [2 * n_star, 10 * n_star]
    for n in ns:
        val = abs(evaluate(h, float(n)))
        # relative slack covers rounding in the float evaluation of F(n)
        minor = 0.5 * abs(lam_star) * n ** e_star * (1.0 - 1e-12)
        res.add(f"|F({n})| >= |lambda*| n^e* / 2", val, minor, ">=")
    return res


# --------------------------------------------------------------------------
# sequences
# --------------------------------------------------------------------------

def check_sequence_convergence(t: float = 0.0, cfg: ToleranceConfig = DEFAULT,
                               tol: float = 1e-3, max_n: int = 40,
                               primes_upto: int = 3) -> CheckResult:
    if not 0.0 <= t < 0.125:
        raise ParameterError("shift must lie in [0, 1/8)")
    res = CheckResult(f"sequence_convergence[t={t!r}]", "tail trains tend to zero in d_X")
    # resolving d_n down to n = max_n needs a series depth past max_n and an
    # error bound far below max_n / 2**max_n
    cfg = ToleranceConfig(min(cfg.metric_tol, 2.0 ** -(max_n + 60)), cfg.quad_tol,
                          min(cfg.series_tail_tol, 2.0 ** -(max_n + 60)))
    specs = [FamilySpec("triangle", shift=t)] + \
        [FamilySpec("prime", j=j, shift=t) for j in range(1, primes_upto + 1)]
    for spec in specs:
        name = spec.to_text()
        bound = sequence_tail_bound(spec)
        ds = [dx_distance(make_train(spec.with_start(n)), None, cfg) for n in range(1, max_n + 1)]
        for n in range(1, max_n):
            res.add(f"{name}: d_{n + 1} < d_{n}", ds[n].value + ds[n].error_bound,
                    ds[n - 1].value - ds[n - 1].error_bound, "<")
        n_thr = 1
        while not bound(n_thr) < tol:
            n_thr += 1
        res.add(f"{name}: analytic threshold", n_thr, max_n, "<=")
        for n in range(n_thr, max_n + 1):
            res.add(f"{name}: d_{n} < tol", ds[n - 1].value + ds[n - 1].error_bound, tol, "<")
            res.add(f"{name}: d_{n} <= tail bound", ds[n - 1].value - ds[n - 1].error_bound,
                    bound(n), "<=")
        res.add(f"{name}: tail bound beyond {max_n} below tol", bound(max_n + 1), tol, "<")
        d = dc0_distance(lambda n, s=spec: make_train(s.with_start(n)), None, cfg,
                         monotone_tail=bound)
        res.add(f"{name}: |dc0 - d_1|", abs(d.value - ds[0].value),
                d.error_bound + ds[0].error_bound, "<=")
    return res


def check_almost_uniform(t: float = 0.0, epsilon: float = 0.3, seed: int = 0,
                         samples: int = 10 ** 4, cfg: ToleranceConfig = DEFAULT) -> CheckResult:
    if not epsilon > 0:
        raise ParameterError("epsilon must be > 0")
    res = CheckResult(f"almost_uniform[t={t!r},eps={epsilon!r}]",
                      "support measure of E_n is a geometric tail")
    f = make_train(FamilySpec("triangle", shift=t))
    n = 1
    while not support_tail_measure(f, n) < epsilon:
        n += 1
    meas = support_tail_measure(f, n)
    res.add(f"m(E_{n}) == 2^(1-{n})", meas, math.ldexp(1.0, 1 - n), "==")
    for k in range(1, 41):
        res.add(f"m(E_{k + 1}) <= m(E_{k})", support_tail_measure(f, k + 1),
                support_tail_measure(f, k), "<=")
    xs = _points_outside(t, n, samples, seed, n + 25)
    res.add("sample size outside E_N", len(xs), samples, "==")
    worst = 0.0
    for k in range(n, n + 21):
        tr = make_train(FamilySpec("triangle", shift=t, start_index=k))
        worst = max(worst, float(np.max(np.abs(evaluate_many(tr, xs)))))
    res.add(f"max |f_n| off E_{n} for n in [{n}, {n + 20}]", worst, 0.0, "==")
    return res


def _outside_tail_supports(xs, t, n):
    m = np.floor(xs - t + 0.5)
    inside = (m >= n) & (np.abs(xs - (m + t)) <= np.ldexp(1.0, -(m.astype(np.int64) + 1)))
    return ~inside


def _points_outside(t, n, count, seed, hi):
    """``count`` seeded uniform points in [0, hi] outside E_n."""
    rng = np.random.default_rng(seed)
    out = np.empty(0)
    while out.size < count:
        xs = rng.uniform(0.0, hi, size=2 * count)
        out = np.concatenate([out, xs[_outside_tail_supports(xs, t, n)]])
    return out[:count]


def superlevel_interval(m: int, threshold: float = 1.0):
    """Exact open interval on which the m-th triangle exceeds ``threshold``:
    |x - m| < 2**-(m+1) (1 - threshold/m).  None when threshold >= m."""
    if Fraction(threshold) >= m:
        return None
    half = Fraction(1, 2 ** (m + 1)) * (1 - Fraction(threshold) / m)
    return (m - half, m + half)


def refute_uniform_ae(n: int = 3, threshold: float = 1.0, count: int = 20) -> CheckResult:
    if int(n) != n or n < 1:
        raise ParameterError("n must be an integer >= 1")
    res = CheckResult(f"refute_uniform_ae[n={n},threshold={threshold!r}]",
                      "positive-length super-level sets of every tail term")
    f = make_train("triangle")
    for m in range(n, n + count + 1):
        iv = superlevel_interval(m, threshold)
        if iv is None:
            res.add(f"m={m}: peak <= threshold, no interval (reported)", 0, 0, "==")
            continue
        lo, hi = iv
        length = hi - lo
        res.add(f"m={m}: length == (1 - threshold/m) 2^-m", length,
                (1 - Fraction(threshold) / m) / 2 ** m, "==")
        res.add(f"m={m}: length > 0", length, 0, ">")
        mid = (lo + hi) / 2
        res.add(f"m={m}: f(midpoint) > threshold", evaluate(f, float(mid)), threshold, ">")
        inner = float(mid - Fraction(999, 1000) * (length / 2))
        res.add(f"m={m}: f near the left end > threshold", evaluate(f, inner), threshold, ">")
    return res


# --------------------------------------------------------------------------
# growth profiles and smooth trains
# --------------------------------------------------------------------------

def check_growth_alpha(profile: GrowthProfile, cfg: ToleranceConfig = DEFAULT,
                       max_n: Optional[int] = None) -> CheckResult:
    res = CheckResult(f"growth_alpha[{profile.label}]", "growth-profile train beats alpha")
    if max_n is None:
        max_n = 4 if profile.label == "double_exp" else 20
    profile.check(np.linspace(0.0, float(max_n), 1000))
    f = make_train(FamilySpec("alpha", profile=profile.label))
    for n in range(1, max_n + 1):
        ratio = evaluate(f, float(n)) / profile(float(n))
        res.add(f"|f({n})/alpha({n}) - {n}|", abs(ratio - n), 1e-12)
    v = l1_norm(f, cfg)
    res.add("l1(f_alpha)", v.value + v.error_bound, 1.0)
    return res


def _forward_diffs(f, a, h, sign):
    """Scaled one-sided differences Delta^k f(a) / h^k, k = 1..3."""
    ys = [evaluate(f, a + sign * k * h) for k in range(4)]
    d1 = (ys[1] - ys[0]) / h
    d2 = (ys[2] - 2 * ys[1] + ys[0]) / h ** 2
    d3 = (ys[3] - 3 * ys[2] + 3 * ys[1] - ys[0]) / h ** 3
    return d1, d2, d3


def check_smooth_family(cfg: ToleranceConfig = DEFAULT, max_n: int = 30) -> CheckResult:
    res = CheckResult("smooth_family", "smooth bump train, integrable and unbounded")
    phi = make_train("smooth")
    worst_fd = 0.0
    for n in range(1, max_n + 1):
        res.add(f"phi({n}) == {n}", evaluate(phi, float(n)), float(n), "==")
        w = 2.0 ** -(n + 1)
        res.add(f"phi at both support ends ({n})",
                max(abs(evaluate(phi, n - w)), abs(evaluate(phi, n + w))), 0.0, "==")
        h = w / 1000.0
        for a, sign in ((n - w, 1.0), (n + w, -1.0)):
            worst_fd = max(worst_fd, max(abs(d) for d in _forward_diffs(phi, a, h, sign)))
    res.add("max one-sided differences of order 1..3 at support ends", worst_fd, 1e-4, "<")
    masses = [phi.piece_at(n).mass()[0] for n in range(1, 81)]
    partial = np.cumsum(masses)
    worst = max(abs(partial[big_n + 9] - partial[big_n - 1]) for big_n in range(30, 71))
    res.add("|S_(N+10) - S_N| for N in [30, 70]", float(worst), 1e-6, "<")
    v, e = phi.piece_at(3).mass()
    res.add("integral of phi_3 > 0", v - e, 0.0, ">")
    res.add("integral of phi_3 < 3 2^-3", v + e, 3 * 2.0 ** -3, "<")
    return res


# --------------------------------------------------------------------------
# approximation certificates
# --------------------------------------------------------------------------

def approx_corpus():
    """Named members of the approximation corpus."""
    return {
        "triangle": make_train("triangle"),
        "triangle:t=0.05": make_train("triangle:t=0.05"),
        "prime:j=1": make_train("prime:j=1"),
        "power:p=2": make_train("power:p=2"),
        "2*triangle-triangle:t=0.1": combine([(2.0, make_train("triangle")),
                                              (-1.0, make_train("triangle:t=0.1"))]),
        "smooth": make_train("smooth"),
    }


def check_approximants(cfg: ToleranceConfig = DEFAULT, eps_list=(0.1,),
                       names: Optional[Sequence[str]] = None) -> CheckResult:
    res = CheckResult("approximants", "polygonal density, null-sequence and perturbation certificates")
    corpus = approx_corpus()
    for name in names or list(corpus):
        f = corpus[name]
        for eps in eps_list:
            b, cert = polygonal_approximant(f, eps, cfg)
            d = cert.achieved_distance
            res.add(f"{name} eps={eps}: d_X(f,b)+err", d.value + d.error_bound, eps, "<")
            res.add(f"{name} eps={eps}: max budget share", max(cert.budget_split), eps / 6, "<")
            deep = dx_distance(f, b, cfg, depth=2 * d.truncation_index)
            res.add(f"{name} eps={eps}: recomputed at doubled depth", deep.value - deep.error_bound,
                    eps, "<")
    spec = FamilySpec("triangle")
    seq_eps = 0.5
    _, cert = sequence_approximant(lambda n: make_train(spec.with_start(n)), seq_eps,
                                   sequence_tail_bound(spec), cfg)
    d = cert.achieved_distance
    res.add(f"sequence eps={seq_eps}: dc0+err", d.value + d.error_bound, seq_eps, "<")
    for eps, bound in ((0.1, 10),):
        g, cert = bump_perturb(make_train("triangle"), eps, bound, cfg)
        d = cert.achieved_distance
        res.add(f"perturb eps={eps}: d_X(f,g)+err", d.value + d.error_bound, eps, "<")
        res.add(f"perturb eps={eps}: |g(x0)|", abs(cert.extra["g_at_x0"]), bound, ">")
    return res


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------

def random_shifts(rng, k):
    """k distinct sorted shifts in [0, 1/8)."""
    while True:
        ts = np.sort(rng.uniform(0.0, 0.125, size=k))
        if np.all(np.diff(ts) > 0):
            return [float(t) for t in ts]


def random_monomial(rng, max_vars=4, max_degree=4):
    s = int(rng.integers(1, max_vars + 1))
    exps = [0] * s
    for _ in range(int(rng.integers(1, max_degree + 1))):
        exps[int(rng.integers(0, s))] += 1
    if exps[-1] == 0:
        exps[-1] = 1
    return Monomial(tuple(exps))


def random_polynomial(rng, max_terms=4):
    mons = []
    while len(mons) < int(rng.integers(1, max_terms + 1)):
        m = random_monomial(rng)
        if m not in mons:
            mons.append(m)
    lams = []
    for _ in mons:
        lam = float(np.round(rng.uniform(-5.0, 5.0), 3))
        lams.append(lam if lam != 0 else 1.0)
    return list(zip(lams, mons))


def _merge(name, parts, anchor):
    res = CheckResult(name, anchor)
    for part in parts:
        if part.error is not None:
            res.error = part.error
        res.details.extend(part.details)
    return res


def _suite_checks(cfg: ToleranceConfig, seed: int):
    rng = np.random.default_rng(seed)
    indep_ts = [random_shifts(rng, 5) for _ in range(20)]
    combos = []
    for _ in range(20):
        k = int(rng.integers(1, 5))
        ts = random_shifts(rng, k)
        cs = [float(np.round(rng.uniform(-5.0, 5.0), 3)) for _ in range(k)]
        if cs[-1] == 0.0:
            cs[-1] = 1.0
        combos.append((cs, ts))
    mons = [random_monomial(rng) for _ in range(10)]
    polys = [random_polynomial(rng) for _ in range(10)]
    au_seed = int(rng.integers(0, 2 ** 31))

    return {
        "l1_closed_forms": lambda: check_l1_closed_forms(cfg),
        "independence_witness": lambda: _merge(
            "independence_witness",
            [check_independence_witness((0.0, 0.1)), check_independence_witness((0.0, 0.05, 0.1))]
            + [check_independence_witness(ts) for ts in indep_ts],
            "translated triangle trains, witness point x0"),
        "combination_growth": lambda: _merge(
            "combination_growth",
            [check_combination_growth((2.0, 3.0), (0.0, 0.1)), check_combination_growth((1.0,), (0.0,))]
            + [check_combination_growth(cs, ts) for cs, ts in combos],
            "combination of translates grows like |c_s| n"),
        "monomial_identity": lambda: _merge(
            "monomial_identity",
            [check_monomial_identity(Monomial.parse(s)) for s in ("x1", "x1 x2", "x1^2 x3")]
            + [check_monomial_identity(m) for m in mons],
            "monomial in prime trains equals power train"),
        "algebraic_growth": lambda: _merge(
            "algebraic_growth",
            [check_algebraic_growth([(1.0, Monomial.parse("x2")), (-5.0, Monomial.parse("x1"))])]
            + [check_algebraic_growth(p) for p in polys],
            "apex values of a polynomial in prime trains diverge"),
        "sequence_convergence": lambda: _merge(
            "sequence_convergence",
            [check_sequence_convergence(0.0, cfg), check_sequence_convergence(0.05, cfg)],
            "tail trains tend to zero in d_X"),
        "almost_uniform": lambda: check_almost_uniform(0.0, 0.3, au_seed, cfg=cfg),
        "refute_uniform_ae": lambda: refute_uniform_ae(3, 1.0, 27),
        "growth_alpha": lambda: _merge(
            "growth_alpha", [check_growth_alpha(p, cfg) for p in (ONE, poly(2), EXP, DOUBLE_EXP)],
            "growth-profile train beats alpha"),
        "smooth_family": lambda: check_smooth_family(cfg),
        "approximants": lambda: check_approximants(cfg),
    }


SUITES = ("l1_closed_forms", "independence_witness", "combination_growth", "monomial_identity",
          "algebraic_growth", "sequence_convergence", "almost_uniform", "refute_uniform_ae",
          "growth_alpha", "smooth_family", "approximants")


def run_all(config: ToleranceConfig = DEFAULT, seed: int = 0,
            suites: Optional[Sequence[str]] = None) -> Report:
    """Run the selected suites (default: all); failures are recorded, never raised."""
    checks = _suite_checks(config, seed)
    names = list(SUITES) if suites is None else list(suites)
    for name in names:
        if name not in checks:
            raise ParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    results = []
    for name in sorted(names):
        try:
            res = checks[name]()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(name, "", error=f"{type(exc).__name__}: {exc}")
        res.name = name
        results.append(res)
    return Report(results, config, int(seed))
