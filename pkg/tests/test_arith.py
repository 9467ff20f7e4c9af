from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import primes, rationals
from pslzp.arith import (
    INFINITY,
    LogDist,
    Q,
    abs_p,
    ceil_log,
    check_prime,
    fmt,
    is_prime,
    logdist_combine,
    mod_p_power,
    prime_to_p,
    unit_part,
    val_p,
)


def _naive_val(x: Fraction, p: int) -> int:
    # count factors by trial division on numerator and denominator separately
    v = 0
    n, d = abs(x.numerator), x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def test_q_accepts_strings_and_ints():
    assert Q("3/6") == Fraction(1, 2)
    assert Q(-4) == Fraction(-4)
    assert Q(" 7/3 ") == Fraction(7, 3)
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(TypeError):
        Q(True)


def test_fmt_is_num_over_den():
    assert fmt(Fraction(6, 4)) == "3/2"
    assert fmt(Fraction(5)) == "5"
    assert fmt(Fraction(-1, 3)) == "-1/3"


def test_primes():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    for bad in (0, 1, 4, 9, -3):
        with pytest.raises(ValueError):
            check_prime(bad)


def test_valuation_examples():
    assert val_p(12, 2) == 2
    assert val_p(Fraction(1, 8), 2) == -3
    assert val_p(Fraction(9, 4), 3) == 2
    assert val_p(7, 5) == 0
    assert val_p(0, 3) is INFINITY


def test_valuation_of_zero_is_infinite():
    assert INFINITY > 10**9
    assert INFINITY + 5 is INFINITY
    assert min(INFINITY, 3) == 3


def test_abs_p_examples():
    assert abs_p(Fraction(1, 2), 2) == 2
    assert abs_p(18, 3) == Fraction(1, 9)
    assert abs_p(0, 5) == 0


@given(rationals(nonzero=True), primes)
def test_val_matches_trial_division(x, p):
    assert val_p(x, p) == _naive_val(x, p)


@given(rationals(nonzero=True), rationals(nonzero=True), primes)
def test_val_is_additive(x, y, p):
    assert val_p(x * y, p) == val_p(x, p) + val_p(y, p)


@given(rationals(), rationals(), primes)
def test_ultrametric_inequality(x, y, p):
    assert abs_p(x + y, p) <= max(abs_p(x, p), abs_p(y, p))
    if abs_p(x, p) != abs_p(y, p):
        assert abs_p(x + y, p) == max(abs_p(x, p), abs_p(y, p))


@given(rationals(nonzero=True), primes)
def test_unit_part_has_valuation_zero(x, p):
    u = unit_part(x, p)
    assert val_p(u, p) == 0
    assert u * Fraction(p) ** val_p(x, p) == x


def test_prime_to_p():
    assert prime_to_p(96, 2) == 3
    assert prime_to_p(-45, 3) == 5
    with pytest.raises(ValueError):
        prime_to_p(0, 2)


@given(rationals(), primes, st.integers(-4, 6))
def test_mod_p_power_is_canonical(x, p, m):
    r = mod_p_power(x, p, m)
    assert 0 <= r < Fraction(p) ** m
    assert prime_to_p(r.denominator, p) == 1
    # x - r lies in p^m Z_p
    assert x == r or val_p(x - r, p) >= m


def test_mod_p_power_examples():
    assert mod_p_power(5, 2, 1) == 1
    assert mod_p_power(Fraction(1, 3), 2, 2) == 3  # 3 * 3 = 9 = 1 mod 4
    assert mod_p_power(Fraction(3, 4), 2, 0) == Fraction(3, 4)
    assert mod_p_power(7, 3, -1) == 0


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**6), st.integers(2, 9))
def test_ceil_log_brackets(x, base):
    e = ceil_log(x, base)
    assert Fraction(base) ** e >= x
    assert Fraction(base) ** (e - 1) < x


def test_ceil_log_examples():
    assert ceil_log(1, 2) == 0
    assert ceil_log(3, 2) == 2
    assert ceil_log(4, 2) == 2
    assert ceil_log(Fraction(1, 9), 3) == -2
    with pytest.raises(ValueError):
        ceil_log(0, 2)


def test_logdist_combination_multiplies_arguments():
    combined = logdist_combine(LogDist(4), LogDist(Fraction(9, 4)))
    assert combined == LogDist(9)
    assert LogDist(2) + LogDist(3) == LogDist(6)
    assert str(LogDist(Fraction(1, 2)) + LogDist(8)) == "log(4)"


def test_logdist_with_p_squared_and_H_squared():
    p, H = 3, Fraction(2)
    assert logdist_combine(LogDist(p**2), LogDist(H**2)).argument == p**2 * H**2


def test_logdist_rejects_nonpositive():
    with pytest.raises(ValueError):
        LogDist(0)
    assert LogDist(2) < LogDist(3)
