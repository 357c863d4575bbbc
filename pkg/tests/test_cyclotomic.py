"""Exact arithmetic in cyclotomic fields and the cosine-sum vanishing scan.

Everything here is integer/rational; the only floats appear in ``evaluate``
cross-checks against the complex embedding.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boxham.cyclotomic import (
    CyclotomicElement,
    cos_as_element,
    cos_sum_is_zero,
    cyclotomic_polynomial,
    totient,
    verify_nonvanishing,
)
from boxham.errors import CombinatorialLimitError, EmbeddingError


def test_totient_small_values():
    assert [totient(m) for m in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert totient(770) == 240


def test_cyclotomic_polynomial_known_cases():
    # coefficients low-order first
    assert cyclotomic_polynomial(1) == [-1, 1]
    assert cyclotomic_polynomial(2) == [1, 1]
    assert cyclotomic_polynomial(3) == [1, 1, 1]
    assert cyclotomic_polynomial(4) == [1, 0, 1]
    assert cyclotomic_polynomial(6) == [1, -1, 1]
    assert cyclotomic_polynomial(12) == [1, 0, -1, 0, 1]


def test_cyclotomic_polynomial_degree_is_totient():
    for m in (5, 8, 15, 30, 105, 770):
        poly = cyclotomic_polynomial(m)
        assert len(poly) - 1 == totient(m)
        assert poly[-1] == 1  # monic


def test_cyclotomic_polynomial_105_has_coefficient_minus_two():
    # the first index where a coefficient outside {-1,0,1} appears
    assert -2 in cyclotomic_polynomial(105)


def test_cyclotomic_polynomial_roots_are_primitive():
    for m in (7, 12):
        poly = cyclotomic_polynomial(m)
        root = np.exp(2j * np.pi / m)
        value = sum(c * root**k for k, c in enumerate(poly))
        assert abs(value) < 1e-9


def test_element_rational_roundtrip():
    e = CyclotomicElement.rational(12, Fraction(3, 7))
    assert not e.is_zero()
    assert (e - CyclotomicElement.rational(12, Fraction(3, 7))).is_zero()
    assert e.evaluate() == pytest.approx(3 / 7)


def test_element_ring_operations_match_embedding():
    x = cos_as_element(1, 5, 10)
    y = cos_as_element(2, 5, 10)
    fx, fy = math.cos(math.pi / 5), math.cos(2 * math.pi / 5)
    assert (x + y).evaluate() == pytest.approx(fx + fy, abs=1e-12)
    assert (x * y).evaluate() == pytest.approx(fx * fy, abs=1e-12)
    assert x.scaled(Fraction(5, 2)).evaluate() == pytest.approx(2.5 * fx, abs=1e-12)
    assert (-x + x).is_zero()


def test_cos_as_element_golden_identity():
    # cos(pi/5) - cos(2pi/5) = 1/2, an exact identity in Q(zeta_10)
    diff = cos_as_element(1, 5, 10) - cos_as_element(2, 5, 10)
    assert (diff - CyclotomicElement.rational(20, Fraction(1, 2))).is_zero()


def test_cos_as_element_validates_range():
    with pytest.raises(ValueError):
        cos_as_element(0, 5, 10)
    with pytest.raises(ValueError):
        cos_as_element(5, 5, 10)
    with pytest.raises(EmbeddingError):
        cos_as_element(1, 5, 12)  # 5 does not divide 12


def test_cos_sum_controls():
    # cos(pi/2) = 0 and cos(pi/3) + cos(2pi/3) = 0, both exact
    assert cos_sum_is_zero((2,), (1,))
    assert cos_sum_is_zero((3, 3), (1, 2))
    assert not cos_sum_is_zero((3,), (1,))
    assert not cos_sum_is_zero((5, 7), (1, 1))


def test_verify_nonvanishing_coprime_pair():
    rep = verify_nonvanishing((5, 7))
    assert rep.admissible
    assert not rep.reasons
    assert rep.tuples == 24
    assert rep.zeros == 0
    assert not rep.witnesses


def test_verify_nonvanishing_flags_inadmissible_input():
    rep = verify_nonvanishing((2,))
    assert not rep.admissible
    assert rep.reasons  # says why
    # the scan still runs and finds the vanishing tuple n=1
    assert rep.zeros >= 1
    assert (1,) in rep.witnesses

    rep = verify_nonvanishing((5, 10))
    assert not rep.admissible


def test_verify_nonvanishing_non_coprime_finds_zero():
    rep = verify_nonvanishing((3, 3))
    assert not rep.admissible
    assert rep.zeros >= 1
    assert (1, 2) in rep.witnesses or (2, 1) in rep.witnesses


def test_modulus_cap_is_enforced():
    with pytest.raises(CombinatorialLimitError):
        verify_nonvanishing((5003, 7001))


@settings(max_examples=60, deadline=None)
@given(
    p=st.sampled_from([5, 7, 11, 13]),
    data=st.data(),
)
def test_exact_zero_test_agrees_with_float_evaluation(p, data):
    n = data.draw(st.integers(1, p - 1), label="n")
    q = data.draw(st.sampled_from([5, 7, 11, 13]), label="q")
    m = data.draw(st.integers(1, q - 1), label="m")
    ps, ns = (p, q), (n, m)
    float_sum = math.cos(math.pi * n / p) + math.cos(math.pi * m / q)
    exact_zero = cos_sum_is_zero(ps, ns)
    if exact_zero:
        assert abs(float_sum) < 1e-9
    else:
        assert abs(float_sum) > 1e-9


@settings(max_examples=30, deadline=None)
@given(m=st.integers(2, 200))
def test_cyclotomic_product_over_divisors(m):
    # Prod_{d | m} Phi_d(x) = x^m - 1, checked at x = 3 in exact integers
    x = 3
    prod = 1
    for d in range(1, m + 1):
        if m % d == 0:
            poly = cyclotomic_polynomial(d)
            prod *= sum(c * x**k for k, c in enumerate(poly))
    assert prod == x**m - 1
