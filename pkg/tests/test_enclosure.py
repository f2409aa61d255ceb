import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from controls.coeffs_service import f_coeff
from controls.enclosure_service import EnclosureService, enclose, enclosure_defect, partial_sum_multiplier
from controls.verify_service import increasing_holds, interlacing_holds
from modules.errors import DomainError
from modules.highprec import eval_e_of_x
from modules.models import EMultiple

from conftest import negative_unit_interval, unit_interval


@pytest.mark.parametrize("x, n, expected", [
    (Fraction(1, 2), 1, Fraction(3, 4)),
    (Fraction(1, 2), 2, Fraction(83, 96)),
    (Fraction(0), 7, Fraction(1)),
])
def test_partial_sum_multiplier(x, n, expected):
    assert partial_sum_multiplier(x, n) == expected


def test_two_sided_bound_at_one_half():
    report = enclose(Fraction(1, 2), 2)
    assert report.sided == "two"
    assert report.lower == EMultiple(multiplier=Fraction(3, 4))
    assert report.upper == EMultiple(multiplier=Fraction(83, 96))
    assert report.numeric.contains(Fraction(9, 4))
    assert abs(float(report.numeric_lo) - 2.0387) < 1e-4
    assert abs(float(report.numeric_hi) - 2.3502) < 1e-4


def test_lower_only_bound_for_negative_x():
    report = enclose(Fraction(-1, 2), 3)
    assert report.sided == "lower"
    assert report.upper is None and report.numeric_hi is None
    assert report.lower.multiplier == 1 + Fraction(1, 4) + Fraction(11, 96) + Fraction(7, 128)
    # e(-1/2) = (1/2)^(-2) = 4
    assert report.numeric_lo < 4
    assert abs(report.estimate - 4) < mpmath.mpf(10) ** -50


def test_bound_at_zero_is_e():
    report = enclose(0, 5)
    assert report.lower == report.upper == EMultiple(multiplier=1)
    assert abs(float(report.numeric.mid()) - math.e) < 1e-15


def test_report_json_keys():
    payload = enclose(Fraction(1, 2), 2).to_dict()
    assert payload["lower_mul"] == "3/4"
    assert payload["upper_mul"] == "83/96"
    assert payload["sided"] == "two"
    assert payload["precision_bits"] == 256
    assert payload["estimate"] is None


@pytest.mark.parametrize("x", [Fraction(1), Fraction(-1), Fraction(3, 2)])
def test_x_outside_domain(x):
    with pytest.raises(DomainError):
        enclose(x, 2)


def test_floats_and_bad_orders_refused():
    with pytest.raises(DomainError):
        enclose(0.5, 2)
    with pytest.raises(DomainError):
        enclose(Fraction(1, 2), 0)


def test_enclosure_defect_examples():
    assert enclosure_defect(Fraction(1, 2), 2) == Fraction(11, 96)
    assert enclosure_defect(Fraction(1, 2), 3) == Fraction(7, 128)
    with pytest.raises(DomainError):
        enclosure_defect(Fraction(-1, 2), 2)


@given(unit_interval, st.integers(min_value=1, max_value=10))
def test_defect_is_last_term(x, n):
    assert enclosure_defect(x, n) == f_coeff(n) * x ** n


@given(unit_interval)
@settings(max_examples=15)
def test_interlacing_on_unit_interval(x):
    assert interlacing_holds(x, 12)


@given(negative_unit_interval)
@settings(max_examples=15)
def test_increasing_on_negative_side(x):
    assert increasing_holds(x, 12)


@pytest.mark.slow
@pytest.mark.parametrize("x", [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(9, 10)])
def test_true_value_strictly_inside(x):
    target = eval_e_of_x(x, 200)
    for n in range(1, 13):
        assert enclose(x, n, 200).numeric.strictly_contains(target)


def test_classical_sandwich():
    report = EnclosureService.classical_sandwich(Fraction(1, 4))
    assert report.lower.multiplier == Fraction(7, 8)
    assert report.upper.multiplier == Fraction(7, 8) + Fraction(11, 24) / 16


def test_approach_table_shrinks_on_negative_side():
    rows = EnclosureService.approach_table(Fraction(-1, 2), [1, 2, 4, 8])
    gaps = [float(r["gap"]) for r in rows]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
