"""Acceptance criteria 1-16, each at its stated tolerance.

Every test prints one PASS/FAIL line; the same lines are repeated in the
terminal summary under "acceptance criteria".
"""
import itertools
import math
import subprocess
import sys

import numpy as np
import pytest

from pwtrains import (
    DOUBLE_EXP, EXP, ONE, FamilySpec, Monomial, bump_perturb, combine, dc0_distance,
    dx_distance, evaluate, evaluate_many, l1_norm, make_train, p_index_roundtrip, poly,
    polygonal_approximant, sequence_tail_bound, support_tail_measure,
)
from pwtrains.verify import (
    _outside_tail_supports, _points_outside, approx_corpus, check_algebraic_growth,
    check_combination_growth, check_growth_alpha, check_independence_witness,
    check_monomial_identity, check_smooth_family, random_monomial, random_polynomial,
    random_shifts, superlevel_interval,
)

from conftest import ACCEPTANCE

SEED = 20240


def record(num, ok, text):
    ACCEPTANCE[num] = (bool(ok), text)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {text}")
    assert ok, text


def failing(res):
    return [d.description for d in res.details if not d.ok] + ([res.error] if res.error else [])


# 1 ------------------------------------------------------------------------

def test_criterion_01_l1_closed_forms():
    base = l1_norm(make_train("triangle"))
    worst = abs(base.value - 1.0)
    for n in range(1, 41):
        oracle = math.fsum(m / 2.0 ** (m + 1) for m in range(n, n + 200))
        v = l1_norm(make_train(FamilySpec("triangle", start_index=n)))
        worst = max(worst, abs(v.value - (n + 1) / 2.0 ** n), abs(v.value - oracle))
    record(1, worst < 1e-10, f"max |l1 - closed form| = {worst:.3g} (< 1e-10)")


# 2 ------------------------------------------------------------------------

def test_criterion_02_exact_peaks():
    f = make_train("triangle")
    bitwise = all(evaluate(f, float(n)) == n for n in range(1, 51))
    worst = 0.0
    for p in (math.log(2), math.log(3), 2.0):
        g = make_train(FamilySpec("power", p=p))
        for n in range(1, 31):
            worst = max(worst, abs(evaluate(g, float(n)) - n ** p) / n ** p)
    record(2, bitwise and worst <= 1e-14,
           f"f(n) == n bitwise for n <= 50: {bitwise}; max rel err of g_p(n) = {worst:.3g}")


# 3 ------------------------------------------------------------------------

def test_criterion_03_independence_witnesses():
    rng = np.random.default_rng(SEED)
    bad = []
    for k in range(100):
        ts = random_shifts(rng, 5)
        res = check_independence_witness(ts)
        if not res.passed:
            bad.append((k, failing(res)))
    record(3, not bad, f"100 random 5-tuples, {len(bad)} failures")


# 4 ------------------------------------------------------------------------

def test_criterion_04_combination_growth():
    rng = np.random.default_rng(SEED + 1)
    bad = 0
    for _ in range(50):
        k = int(rng.integers(1, 6))
        ts = random_shifts(rng, k)
        cs = [float(c) for c in rng.uniform(-10, 10, size=k)]
        cs[-1] = cs[-1] or 1.0
        res = check_combination_growth(cs, ts, count=20)
        bad += not res.passed
    record(4, bad == 0, f"50 random combinations, exact |c_s| n at 20 apexes each, {bad} failures")


# 5 ------------------------------------------------------------------------

def _small_monomials():
    for s in range(1, 5):
        for exps in itertools.product(range(5), repeat=s):
            if exps[-1] and 1 <= sum(exps) <= 4:
                yield Monomial(exps)


def test_criterion_05_algebra_identity():
    mons = list(_small_monomials())
    rng = np.random.default_rng(SEED + 2)
    mons += [random_monomial(rng) for _ in range(20)]
    bad = [str(m) for m in mons if not check_monomial_identity(m).passed]
    record(5, not bad, f"{len(mons)} monomials (all with s <= 4, degree <= 4, plus 20 random); "
                       f"failures: {bad or 'none'}")


# 6 ------------------------------------------------------------------------

def test_criterion_06_codec_bijection():
    first_bad = p_index_roundtrip(2, 10 ** 6)
    record(6, first_bad == 0, f"round trip on [2, 10^6], first failure: {first_bad or 'none'}")


# 7 ------------------------------------------------------------------------

def test_criterion_07_algebraic_growth():
    rng = np.random.default_rng(SEED + 3)
    bad = 0
    for _ in range(20):
        bad += not check_algebraic_growth(random_polynomial(rng, max_terms=4)).passed
    record(7, bad == 0, f"20 random polynomials, |F(n)| >= |l*| n^e* / 2 past n*, {bad} failures")


# 8 ------------------------------------------------------------------------

def test_criterion_08_density_algorithm():
    bad = []
    worst = 0.0
    for name, f in approx_corpus().items():
        for eps in (0.1, 0.01, 0.001):
            try:
                b, cert = polygonal_approximant(f, eps)
            except Exception as exc:  # an uncertifiable member is a failure, not a crash
                bad.append(f"{name}@{eps}: {exc}")
                continue
            d = cert.achieved_distance
            deep = dx_distance(f, b, depth=2 * d.truncation_index)
            worst = max(worst, deep.value / eps)
            if not (cert.certified and deep.value - deep.error_bound < eps):
                bad.append(f"{name}@{eps}")
    record(8, not bad, f"6 corpus members x 3 eps certified, doubled-depth recomputation "
                       f"max d/eps = {worst:.3f}; failures: {bad or 'none'}")


# 9 ------------------------------------------------------------------------

def test_criterion_09_metric_truncation():
    corpus = {
        "triangle": make_train("triangle"),
        "triangle:t=0.05": make_train("triangle:t=0.05"),
        "prime:j=1": make_train("prime:j=1"),
        "power:p=2": make_train("power:p=2"),
        "smooth": make_train("smooth"),
    }
    names = list(corpus)
    pairs = list(itertools.combinations(names, 2))
    assert len(pairs) == 10
    worst = 0.0
    for a, b in pairs:
        f, g = corpus[a], corpus[b]
        vals = {n: dx_distance(f, g, depth=n).value for n in range(10, 36)}
        for n in range(10, 31):
            worst = max(worst, abs(vals[n + 5] - vals[n]) * 2.0 ** n)
    record(9, worst < 1.0, f"10 pairs, N = 10..30: max |d(N+5) - d(N)| * 2^N = {worst:.3f} (< 1)")


# 10 -----------------------------------------------------------------------

def _sequence_report(t):
    spec = FamilySpec("triangle", shift=t)
    ds = [dx_distance(make_train(spec.with_start(n)), None, depth=80) for n in range(1, 61)]
    decreasing = all(ds[n].upper < ds[n - 1].lower for n in range(1, 40))
    above = [(n, ds[n - 1].upper) for n in range(14, 61) if not ds[n - 1].upper < 1e-3]
    bound = sequence_tail_bound(spec)
    tail_ok = bound(61) < 1e-3
    dc0 = dc0_distance(lambda n: make_train(spec.with_start(n)), None, monotone_tail=bound)
    certified = abs(dc0.value - ds[0].value) <= dc0.error_bound + ds[0].error_bound
    return decreasing, above, tail_ok, certified


def test_criterion_10_sequence_convergence():
    parts, ok = [], True
    for t in (0.0, 0.05):
        decreasing, above, tail_ok, certified = _sequence_report(t)
        good = decreasing and not above and tail_ok and certified
        ok &= good
        worst = f"d_{above[0][0]} = {above[0][1]:.6g}" if above else "none"
        parts.append(f"t={t}: decreasing={decreasing}, n >= 14 above 1e-3: {worst}, "
                     f"dc0 certified={certified}")
    record(10, ok, "; ".join(parts))


# 11 -----------------------------------------------------------------------

def test_criterion_11_almost_uniform_sets():
    f = make_train("triangle")
    worst = max(abs(support_tail_measure(f, n) - 2.0 ** (1 - n)) for n in range(1, 41))
    nonzero = 0
    for t in (0.0, 0.05):
        for n in range(1, 26):
            xs = _points_outside(t, n, 10 ** 4, SEED + n, n + 30)
            assert np.all(_outside_tail_supports(xs, t, n))
            tr = make_train(FamilySpec("triangle", shift=t, start_index=n))
            nonzero += int(np.count_nonzero(evaluate_many(tr, xs)))
    record(11, worst <= 1e-12 and nonzero == 0,
           f"max |m(E_n) - 2^(1-n)| = {worst:.3g}; nonzero samples outside E_n: {nonzero}")


# 12 -----------------------------------------------------------------------

def test_criterion_12_uniform_ae_refuter():
    f = make_train("triangle")
    bad = []
    for m in range(3, 31):
        lo, hi = superlevel_interval(m, 1.0)
        exact = (hi - lo) == (1 - 1 / __import__("fractions").Fraction(m)) / 2 ** m
        mid = evaluate(f, float((lo + hi) / 2))
        if not (exact and hi > lo and mid > 1):
            bad.append(m)
    record(12, not bad, f"m = 3..30 intervals of length (1-1/m) 2^-m with f > 1 at the midpoint; "
                        f"failures: {bad or 'none'}")


# 13 -----------------------------------------------------------------------

def test_criterion_13_growth_alpha():
    bad = []
    for prof in (ONE, poly(2), EXP, DOUBLE_EXP):
        res = check_growth_alpha(prof)
        if not res.passed:
            bad.append((prof.label, failing(res)))
    record(13, not bad, f"alpha in (1, x^2, e^x, e^e^x): apex ratio within 1e-12, l1 <= 1; "
                        f"failures: {bad or 'none'}")


# 14 -----------------------------------------------------------------------

def test_criterion_14_smooth_family():
    res = check_smooth_family()
    record(14, res.passed, f"{len(res.details)} smooth-train checks; failures: {failing(res) or 'none'}")


# 15 -----------------------------------------------------------------------

def test_criterion_15_residuality_shadow():
    f = make_train("triangle")
    bad = []
    for eps, n in itertools.product((0.1, 0.01), (10, 100)):
        g, cert = bump_perturb(f, eps, n)
        x0 = cert.extra["x0"]
        if not (cert.certified and abs(evaluate(g, x0)) > n and dx_distance(f, g).upper < eps):
            bad.append((eps, n))
    record(15, not bad, f"(eps, n) in {{0.1, 0.01}} x {{10, 100}}; failures: {bad or 'none'}")


# 16 -----------------------------------------------------------------------

def test_criterion_16_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        proc = subprocess.run([sys.executable, "-m", "pwtrains", "verify", "--suite", "all",
                               "--seed", "7", "--format", "json", "--out", str(path)],
                              capture_output=True)
        outs.append((proc.returncode, path.read_bytes()))
    same = outs[0][1] == outs[1][1]
    record(16, same and outs[0][0] == 0,
           f"two verify runs byte-identical: {same}; exit codes {outs[0][0]}, {outs[1][0]}")
