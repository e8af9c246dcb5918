import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassdyn.delta import (RationalPolynomial, alternating_binomial_sum, binomial_poly, check_L_identity,
                            delta_leading_law, delta_poly)
from grassdyn.errors import InvalidInputError, PreconditionError


def delta_at(n, i, memo=None):
    # oracle: run the recursion on numbers at a fixed integer i, no polynomials
    memo = {} if memo is None else memo
    if n not in memo:
        memo[n] = Fraction(math.comb(i, n)) - sum(delta_at(k, i, memo) * math.comb(i, n - k) for k in range(1, n))
    return memo[n]


def test_binomial_poly_examples():
    assert binomial_poly(0).coefficients == (1,)
    assert binomial_poly(2).coefficients == (0, Fraction(-1, 2), Fraction(1, 2))
    assert binomial_poly(3)(10) == 120


def test_delta_small_cases():
    assert delta_poly(1).coefficients == (0, 1)
    assert delta_poly(2).coefficients == (0, Fraction(-1, 2), Fraction(-1, 2))
    assert delta_poly(5).leading == Fraction(1, 120)
    assert delta_poly(1).as_strings() == ["0", "1"]
    assert str(delta_poly(2)) == "-1/2*i - 1/2*i^2"


def test_delta_rejects_nonpositive():
    with pytest.raises(InvalidInputError):
        delta_poly(0)
    with pytest.raises(InvalidInputError):
        binomial_poly(-1)


@pytest.mark.parametrize("n", range(1, 26))
def test_degree_and_leading_law(n):
    p = delta_poly(n)
    assert p.degree == n
    assert p.leading == delta_leading_law(n)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 14), st.integers(0, 60))
def test_delta_matches_pointwise_recursion(n, i):
    assert delta_poly(n)(i) == delta_at(n, i)


@pytest.mark.parametrize("n", range(2, 31))
def test_parity_sum(n):
    assert alternating_binomial_sum(n) == (0 if n % 2 else 2)


def test_L_identity_examples():
    r = check_L_identity([Fraction(7, 3)], 5)
    assert r.holds and r.lhs == (Fraction(7, 3),)
    r = check_L_identity([1, 2, 3, 4], 10)
    assert r.holds and all(x == 0 for x in r.residuals)
    r = check_L_identity([0, 0, 0], 4)
    assert r.holds and r.lhs == (0, 0, 0) and r.rhs == (0, 0, 0)


def test_L_identity_hypothesis_guard():
    with pytest.raises(PreconditionError):
        check_L_identity([1, 2, 3], 2)
    r = check_L_identity([1, 2, 3], 2, allow_small_i=True)
    assert not r.hypothesis_met
    with pytest.raises(InvalidInputError):
        check_L_identity([], 3)
    with pytest.raises(InvalidInputError):
        check_L_identity([1], -1)


rationals = st.fractions(min_value=-100, max_value=100, max_denominator=100)


@settings(max_examples=100, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=10), st.integers(0, 30))
def test_L_identity_property(u, extra):
    assert check_L_identity(u, len(u) + extra).holds


def test_polynomial_arithmetic():
    p = RationalPolynomial((1, 2))
    q = RationalPolynomial((0, 0, 3))
    assert (p * q).coefficients == (0, 0, 3, 6)
    assert (p - p).degree == -1
    assert (p + q)(2) == 17
    assert (2 * p).coefficients == (2, 4)
    assert str(RationalPolynomial(())) == "0"
