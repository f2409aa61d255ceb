from fractions import Fraction

import pytest
from hypothesis import given

from modules.errors import DomainError
from modules.models import EMultiple, SeriesPoly
from modules.powerseries import (
    oracle_e_coeffs, ps_add, ps_constant, ps_exp, ps_log1p, ps_mul, ps_scale, ps_shift_down, ps_sub, ps_x,
)

from conftest import rational_series, zero_constant_series


def poly(*coeffs):
    return SeriesPoly.from_coeffs([Fraction(c) for c in coeffs])


def test_mul_examples():
    assert ps_mul(poly(1, 1, 0), poly(1, -1, 0)).coeffs == (1, 0, -1)
    assert ps_mul(poly(1, 1, 1), poly(1, 0, 0)).coeffs == (1, 1, 1)
    half = poly(1, Fraction(-1, 2), 0)
    assert ps_mul(half, half).coeffs == (1, -1, Fraction(1, 4))


def test_mul_truncates_to_smaller_order():
    product = ps_mul(poly(1, 1, 1, 1), poly(1, 1))
    assert product.order == 1
    assert product.coeffs == (1, 2)


def test_exp_examples():
    assert ps_exp(ps_x(4)).coeffs == (1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24))
    assert ps_exp(ps_constant(0, 3)).coeffs == (1, 0, 0, 0)
    assert ps_exp(poly(0, Fraction(-1, 2), Fraction(1, 3))).coeffs == (1, Fraction(-1, 2), Fraction(11, 24))


def test_exp_needs_vanishing_constant():
    with pytest.raises(DomainError, match="constant term must vanish"):
        ps_exp(poly(1, 1))


def test_log1p():
    assert ps_log1p(3).coeffs == (0, 1, Fraction(-1, 2), Fraction(1, 3))
    assert ps_log1p(0).coeffs == (0,)
    assert ps_log1p(5).coefficient(5) == Fraction(1, 5)


def test_shift_down_and_linear_ops():
    assert ps_shift_down(ps_log1p(3)).coeffs == (1, Fraction(-1, 2), Fraction(1, 3))
    with pytest.raises(DomainError):
        ps_shift_down(poly(1, 2))
    assert ps_add(poly(1, 2), poly(3, 4, 5)).coeffs == (4, 6)
    assert ps_sub(poly(1, 2), poly(1, 2)).coeffs == (0, 0)
    assert ps_scale(poly(1, 2), Fraction(1, 2)).coeffs == (Fraction(1, 2), 1)


def test_oracle_coefficients():
    assert oracle_e_coeffs(1).coeffs == (1, Fraction(-1, 2))
    assert oracle_e_coeffs(3).coefficient(3) == Fraction(-7, 16)
    assert oracle_e_coeffs(6).coefficient(6) == Fraction(238043, 580608)


def test_series_shape_is_validated():
    with pytest.raises(ValueError):
        SeriesPoly(coeffs=[1, 2], order=3)
    with pytest.raises(ValueError):
        SeriesPoly.from_coeffs([0.5, 1])
    with pytest.raises(DomainError):
        poly(1, 2).coefficient(2)


def test_scaled_series_refuse_arithmetic():
    scaled = SeriesPoly.from_scalars([EMultiple(multiplier=1), EMultiple(multiplier=Fraction(-1, 2))])
    assert scaled.scaled_by_e
    assert scaled.scalar(1) == EMultiple(multiplier=Fraction(-1, 2))
    with pytest.raises(DomainError):
        ps_mul(scaled, scaled)


def test_mixed_scalar_kinds_rejected():
    with pytest.raises(DomainError, match="mixed scalar kinds in one series"):
        SeriesPoly.from_scalars([Fraction(1), EMultiple(multiplier=1)])


def test_series_json():
    assert poly(1, Fraction(-1, 2), Fraction(11, 24)).to_json() == '["1", "-1/2", "11/24"]'


@given(zero_constant_series(), zero_constant_series())
def test_exp_turns_sums_into_products(a, b):
    assert ps_exp(ps_add(a, b)) == ps_mul(ps_exp(a), ps_exp(b))


@given(zero_constant_series(), zero_constant_series())
def test_mul_is_commutative(a, b):
    assert ps_mul(a, b) == ps_mul(b, a)


@given(rational_series(min_order=1, max_order=6), rational_series(min_order=1, max_order=6), rational_series(min_order=1, max_order=6))
def test_mul_is_associative(a, b, c):
    assert ps_mul(ps_mul(a, b), c).coeffs == ps_mul(a, ps_mul(b, c)).coeffs


@pytest.mark.parametrize("order", [1, 2, 7, 20])
def test_exp_inverts_log1p(order):
    series = ps_exp(ps_log1p(order))
    assert series.coeffs == tuple([1, 1] + [0] * (order - 1))


def test_oracle_signs_alternate():
    oracle = oracle_e_coeffs(30)
    for k in range(31):
        coeff = oracle.coefficient(k)
        assert coeff != 0
        assert (coeff > 0) == (k % 2 == 0)
