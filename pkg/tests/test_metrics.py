import math

import pytest
from hypothesis import given, settings, strategies as st

from pwtrains import (
    ZERO, FamilySpec, ParameterError, TailBoundError, ToleranceConfig, combine, dc0_distance,
    dx_distance, l1_norm, make_train, sequence_tail_bound, sup_norm_window, support_tail_measure,
)
from pwtrains.metrics import DEFAULT, series_depth, sup_profile


def _l1_oracle(n, terms=200):
    # sum_{m >= n} m / 2**(m+1) with the geometric tail dropped below 1e-40
    return math.fsum(m / 2.0 ** (m + 1) for m in range(n, n + terms))


def _dx_zero_oracle(depth=60):
    # base train: L1 part 1, window sup on [0, k] is k
    return 1.0 + math.fsum(2.0 ** -k * k / (k + 1) for k in range(1, depth + 1))


CORPUS = ["triangle", "triangle:t=0.05", "power:p=0.6931471805599453", "power:p=2", "smooth",
          "power:p=1.0986122886681098:t=0.1"]


def test_tolerance_config_validation():
    assert DEFAULT == ToleranceConfig(1e-9, 1e-12, 1e-12)
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ParameterError):
            ToleranceConfig(metric_tol=bad)
    assert ToleranceConfig().scaled(0.5).metric_tol == 5e-10
    assert series_depth(DEFAULT) == 31


def test_l1_examples():
    v = l1_norm(make_train("triangle"))
    assert abs(v.value - 1.0) <= v.error_bound + 1e-15
    assert v.error_bound <= 1e-12
    assert l1_norm(ZERO).value == 0.0


@pytest.mark.parametrize("n", [1, 2, 5, 14, 25, 40])
def test_l1_tail_trains(n):
    v = l1_norm(make_train(FamilySpec("triangle", start_index=n)))
    exact = (n + 1) / 2.0 ** n
    assert abs(v.value - exact) <= 1e-12
    assert abs(v.value - _l1_oracle(n)) <= v.error_bound + 1e-15


def test_sup_norm_window_examples():
    f = make_train("triangle")
    assert sup_norm_window(f, 1) == 1.0
    assert sup_norm_window(combine([(1.0, f), (-1.0, f)]), 9) == 0.0
    assert sup_norm_window(make_train(FamilySpec("power", p=math.log(2))), 4) == pytest.approx(
        4 ** math.log(2), rel=1e-14)


def test_sup_profile_matches_sup_abs():
    h = combine([(1.0, make_train("smooth")), (-2.0, make_train("power:p=2:t=0.1"))])
    prof = sup_profile(h, 12)
    for k in range(1, 13):
        assert prof[k - 1] == pytest.approx(sup_norm_window(h, k), rel=1e-12)


def test_dx_examples():
    f = make_train("triangle")
    assert dx_distance(f, f).value == 0.0
    d = dx_distance(f, ZERO)
    assert abs(d.value - _dx_zero_oracle()) <= d.error_bound
    assert d.error_bound <= 1e-9


@pytest.mark.parametrize("text", CORPUS)
def test_truncation_property(text):
    f = make_train(text)
    for n in (10, 20, 30):
        a = dx_distance(f, None, depth=n).value
        b = dx_distance(f, None, depth=n + 5).value
        assert abs(b - a) < 2.0 ** -n


def test_each_series_term_bounded():
    # the function asserts term k < 2**-k internally; a huge function exercises it
    f = make_train("alpha:profile=exp")
    d = dx_distance(f, None, depth=30)
    assert d.value < l1_norm(f).upper + 1.0


@settings(max_examples=15)
@given(st.sampled_from(CORPUS), st.sampled_from(CORPUS), st.sampled_from(CORPUS))
def test_metric_axioms(a, b, c):
    f, g, h = (make_train(x) for x in (a, b, c))
    dfg, dgf = dx_distance(f, g), dx_distance(g, f)
    assert abs(dfg.value - dgf.value) <= dfg.error_bound + dgf.error_bound
    dfh, dgh = dx_distance(f, h), dx_distance(g, h)
    slack = 3 * max(dfg.error_bound, dfh.error_bound, dgh.error_bound)
    assert dfh.value <= dfg.value + dgh.value + slack
    assert dfg.value >= 0.0


@settings(max_examples=10)
@given(st.sampled_from(CORPUS), st.sampled_from(CORPUS), st.sampled_from(CORPUS))
def test_translation_invariance(a, b, c):
    f, g, h = (make_train(x) for x in (a, b, c))
    left = dx_distance(combine([(1.0, f), (1.0, h)]), combine([(1.0, g), (1.0, h)]))
    right = dx_distance(f, g)
    assert abs(left.value - right.value) <= 2 * max(left.error_bound, right.error_bound) + 1e-12


def test_dc0_examples():
    spec = FamilySpec("triangle", shift=0.05)

    def seq(n):
        return make_train(spec.with_start(n))

    tail = sequence_tail_bound(spec)
    assert dc0_distance(seq, seq, monotone_tail=tail).value == 0.0
    d = dc0_distance(seq, None, monotone_tail=tail)
    first = dx_distance(seq(1))
    assert abs(d.value - first.value) <= d.error_bound + first.error_bound
    with pytest.raises(ParameterError):
        dc0_distance(seq, None)


def test_dc0_prefix_truncation():
    spec = FamilySpec("triangle")

    def seq(n):
        return make_train(spec.with_start(n))

    def trunc(n):
        return seq(n) if n <= 3 else ZERO

    tail = sequence_tail_bound(spec)
    d = dc0_distance(seq, trunc, monotone_tail=lambda n: math.inf if n <= 3 else tail(n))
    assert abs(d.value - dx_distance(seq(4)).value) <= d.error_bound + 1e-12


def test_dc0_needs_a_settling_tail():
    seq = lambda n: make_train("triangle")  # noqa: E731
    with pytest.raises(TailBoundError):
        dc0_distance(seq, None, monotone_tail=lambda n: 10.0, max_terms=3)


def test_dc0_decreases_along_prefix_shifts():
    spec = FamilySpec("triangle")
    tail = sequence_tail_bound(spec)
    vals = []
    for k in range(0, 4):
        vals.append(dc0_distance(lambda n: make_train(spec.with_start(n + k)), None,
                                 monotone_tail=lambda n: tail(n + k)).value)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_support_tail_measure_examples():
    f = make_train("triangle")
    assert support_tail_measure(f, 1) == 1.0
    assert support_tail_measure(f, 3) == 0.25
    for n in range(1, 41):
        assert support_tail_measure(f, n) == 2.0 ** (1 - n)
    with pytest.raises(ParameterError):
        support_tail_measure(ZERO, 1)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_support_tail_measure_alpha_exp(n):
    tr = make_train("alpha:profile=exp")
    got = support_tail_measure(tr, n)
    terms = [1.0 / (m * math.exp(m) * 2.0 ** m) for m in range(n, n + 60)]
    # ratio of consecutive terms is below 1/(2e), so the dropped tail is tiny
    oracle = math.fsum(terms)
    assert got == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("n", [5, 14, 20])
def test_tail_train_distance_closed_form(n):
    # f_n: L1 part (n+1)/2**n; window [0, k] holds apexes n..k, so s_k = k for k >= n
    oracle = (n + 1) / 2.0 ** n + math.fsum(2.0 ** -k * k / (k + 1) for k in range(n, n + 80))
    d = dx_distance(make_train(FamilySpec("triangle", start_index=n)), None, depth=n + 80)
    assert abs(d.value - oracle) <= d.error_bound + 1e-15
    if n == 14:
        assert d.lower > 1e-3
