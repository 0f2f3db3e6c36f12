import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pwtrains import (
    DOUBLE_EXP, EXP, ONE, ZERO, FamilySpec, FinitePiecewise, Interval, Monomial, PIndex,
    ParameterError, Piece, evaluate, evaluate_many, integrate_abs, make_cutoff_polygonal,
    make_train, monomial_p_index, p_index_roundtrip, p_index_to_monomial, pieces_in, poly,
    polygonal_from_knots, primes, train_power,
)
from pwtrains.families import Affine, prime_rank, profile_from_name, sequence_tail_bound


def _eratosthenes(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
    return [i for i, v in enumerate(flags) if v]


def _trial_division(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


ORACLE_PRIMES = _eratosthenes(200_000)


# --------------------------------------------------------------------------
# growth profiles and specs
# --------------------------------------------------------------------------

@pytest.mark.parametrize("prof", [ONE, EXP, DOUBLE_EXP, poly(2), poly(3)])
def test_growth_profiles_are_admissible(prof):
    prof.check(np.linspace(0, 5, 1000))
    assert prof(0.0) >= 1.0


def test_profile_names():
    assert profile_from_name("exp") is EXP
    assert profile_from_name("poly2")(3.0) == 9.0
    assert poly(2)(0.5) == 1.0
    with pytest.raises(ParameterError):
        profile_from_name("bogus")


@pytest.mark.parametrize("text", ["triangle", "triangle:t=0.05:start=3", "power:p=2", "prime:j=4",
                                  "alpha:profile=exp", "smooth", "smooth:t=0.1:start=7"])
def test_spec_text_round_trip(text):
    spec = FamilySpec.parse(text)
    assert spec.to_text() == text
    assert FamilySpec.parse(spec.to_text()) == spec


@given(st.sampled_from(["triangle", "smooth", "power", "prime", "alpha"]),
       st.floats(0, 0.124), st.integers(1, 60), st.floats(0.01, 5), st.integers(1, 50))
def test_spec_text_round_trip_property(kind, t, start, p, j):
    kw = {"power": {"p": p}, "prime": {"j": j}, "alpha": {"profile": "poly3"}}.get(kind, {})
    spec = FamilySpec(kind, shift=t, start_index=start, **kw)
    assert FamilySpec.parse(spec.to_text()) == spec


@pytest.mark.parametrize("text", ["triangle:t=0.125", "triangle:t=-0.01", "triangle:start=0",
                                  "power", "power:p=-1", "prime:j=0", "alpha:profile=zz",
                                  "wavelet", "triangle:q=1", "triangle:t"])
def test_invalid_specs(text):
    with pytest.raises(ParameterError):
        FamilySpec.parse(text)


# --------------------------------------------------------------------------
# trains
# --------------------------------------------------------------------------

def test_make_train_examples():
    f = make_train("triangle")
    for n in range(1, 51):
        assert evaluate(f, float(n)) == n
    f1 = make_train("prime:j=1")
    for n in range(1, 31):
        assert evaluate(f1, float(n)) == pytest.approx(n ** math.log(2), rel=1e-14)
    f4 = make_train("triangle:start=4")
    xs = np.linspace(0, 4 - 1 / 32, 5000)
    assert not np.any(evaluate_many(f4, xs))
    assert evaluate(f4, 4.0) == 4


def test_smooth_and_alpha_geometry():
    phi = make_train("smooth")
    piece = phi.piece_at(5)
    assert piece.support.lo == 5 - 2.0 ** -6 and piece.support.hi == 5 + 2.0 ** -6
    for n in range(1, 31):
        for prof in (ONE, poly(2), EXP):
            tr = make_train(FamilySpec("alpha", profile=prof.label))
            assert evaluate(tr, float(n)) == n * prof(n)
    tr = make_train("alpha:profile=one")
    assert tr.piece_at(3).support.hi == Fraction(3) + Fraction(1, 3 * 16)


@pytest.mark.parametrize("text", ["triangle", "triangle:t=0.1", "power:p=2", "smooth:t=0.05",
                                  "alpha:profile=exp"])
def test_gap_property(text):
    tr = make_train(text)
    for m in range(1, 60):
        a, b = tr.piece_at(m).support, tr.piece_at(m + 1).support
        assert float(b.lo) - float(a.hi) >= 0.125


@pytest.mark.parametrize("p", [math.log(2), math.log(3), 2.0])
def test_power_train_l1_bound(p):
    g = make_train(FamilySpec("power", p=p))
    val, err = integrate_abs(g, Interval(0, math.inf), 1e-12)
    # T_{n,p} is the p-th power of T_n, so its area is n**p 2**-n / (p + 1)
    exact = math.fsum(n ** p / ((p + 1) * 2.0 ** n) for n in range(1, 400))
    assert abs(val - exact) <= 1e-10
    assert val <= math.fsum(n ** p / 2.0 ** n for n in range(1, 400))


@pytest.mark.parametrize("j", [2, 3, 5])
def test_prime_train_is_power_of_first(j):
    f1, fj = make_train("prime:j=1"), make_train(f"prime:j={j}")
    g = train_power(f1, math.log(primes(j)) / math.log(2))
    xs = np.linspace(0, 20, 5001)
    a, b = evaluate_many(g, xs), evaluate_many(fj, xs)
    assert np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))) < 1e-9


def test_sequence_tail_bound_dominates():
    spec = FamilySpec("triangle", shift=0.05)
    bound = sequence_tail_bound(spec)
    from pwtrains import dx_distance
    for n in (1, 3, 8, 20):
        assert dx_distance(make_train(spec.with_start(n))).upper <= bound(n)


# --------------------------------------------------------------------------
# primes and codec
# --------------------------------------------------------------------------

def test_primes_examples():
    assert primes(1) == 2
    assert primes(3) == 5
    assert primes(25) == 97
    assert [primes(j) for j in range(1, len(ORACLE_PRIMES) + 1, 997)] == ORACLE_PRIMES[::997]
    assert primes(10 ** 6) == 15_485_863
    with pytest.raises(ParameterError):
        primes(0)
    with pytest.raises(ParameterError):
        primes(10 ** 6 + 1)


def test_prime_rank_inverts_primes():
    for j in (1, 2, 100, 5000, 78_498, 78_499, 500_000):
        assert prime_rank(primes(j)) == j
    with pytest.raises(ParameterError):
        prime_rank(4)


def test_codec_examples():
    assert monomial_p_index(Monomial((2, 0, 1))).value == 20
    assert monomial_p_index(Monomial((1,))).value == 2
    assert monomial_p_index(Monomial((0, 3, 0, 1))).value == 189
    assert p_index_to_monomial(360) == Monomial((3, 2, 1))
    assert str(p_index_to_monomial(360)) == "x1^3 x2^2 x3"
    assert p_index_to_monomial(2) == Monomial((1,))
    assert p_index_to_monomial(PIndex(189)) == Monomial.parse("x2^3 x4")
    for bad in (0, 1, -7):
        with pytest.raises(ParameterError):
            p_index_to_monomial(bad)


def test_monomial_validation():
    assert Monomial((1, 0, 0)).exponents == (1,)
    assert Monomial.parse("x1*x1 x3") == Monomial((2, 0, 1))
    for bad in ((0, 0), (), (-1,), (1.5,)):
        with pytest.raises(ParameterError):
            Monomial(bad)
    for bad in ("", "y1", "x0", "x1^"):
        with pytest.raises((ParameterError, ValueError)):
            Monomial.parse(bad)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8).filter(any))
def test_codec_round_trip_random_monomials(exps):
    m = Monomial(tuple(exps))
    idx = monomial_p_index(m)
    assert p_index_to_monomial(idx) == m
    factors = _trial_division(idx.value)
    assert {ORACLE_PRIMES.index(p) + 1: a for p, a in factors.items()} == {
        i + 1: a for i, a in enumerate(m.exponents) if a}


def test_codec_big_integers():
    m = Monomial((40, 0, 7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3))
    assert p_index_to_monomial(monomial_p_index(m)) == m
    big_prime = primes(900_000)
    assert p_index_to_monomial(2 * big_prime).exponents[-1] == 1


def test_codec_full_range():
    assert p_index_roundtrip(2, 10 ** 6) == 0


@given(st.integers(2, 10 ** 6))
def test_codec_matches_trial_division(n):
    m = p_index_to_monomial(n)
    assert math.prod(primes(i) ** a for i, a in enumerate(m.exponents, 1)) == n


# --------------------------------------------------------------------------
# polygons and cutoffs
# --------------------------------------------------------------------------

def _const(c, n):
    return polygonal_from_knots([0.0, float(n)], [c, c])


def test_cutoff_examples():
    assert make_cutoff_polygonal(_const(0.0, 3), 3, 0.5) is ZERO
    b = make_cutoff_polygonal(_const(1.0, 2), 2, 1.0)
    assert evaluate(b, 2.5) == 0.5
    assert evaluate(b, 2.0) == 1.0
    assert evaluate(b, 3.0) == 0.0
    assert evaluate(b, 9.0) == 0.0
    val, err = integrate_abs(b, Interval(0, math.inf), 0.0)
    assert (val, err) == (2.5, 0.0)
    with pytest.raises(ParameterError):
        make_cutoff_polygonal(_const(1.0, 2), 2, 0.0)


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=12), st.floats(0.01, 2))
def test_cutoff_is_continuous_and_interpolates(ys, gamma):
    xs = [0.5 * k for k in range(len(ys))]
    p = polygonal_from_knots(xs, ys)
    for x, y in zip(xs, ys):
        assert evaluate(p, x) == pytest.approx(y, abs=1e-12)
    n = xs[-1]
    assert evaluate(p, n) == ys[-1]
    b = make_cutoff_polygonal(p, n, gamma)
    if b is ZERO:
        assert not any(ys)
        return
    assert evaluate(b, n) == ys[-1]
    eps = 1e-9
    assert evaluate(b, n + eps) == pytest.approx(ys[-1], abs=1e-6 * (1 + abs(ys[-1])) / gamma)
    assert evaluate(b, n + gamma) == pytest.approx(0.0, abs=1e-12 * (1 + abs(ys[-1])))
    assert evaluate(b, n + gamma + 1e-6) == 0.0


def test_polygon_validation():
    with pytest.raises(ParameterError):
        polygonal_from_knots([0.0], [1.0])
    with pytest.raises(ParameterError):
        polygonal_from_knots([0.0, 0.0], [1.0, 2.0])
    bent = FinitePiecewise((Piece(Interval(0.0, 1.0), Affine(0.0, 1.0)),))
    with pytest.raises(ParameterError):
        make_cutoff_polygonal(bent, 2, 0.5)
