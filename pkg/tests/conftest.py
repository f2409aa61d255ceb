import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from controls.keller_service import KellerService  # noqa: E402
from modules.models import SeriesPoly  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("fast", max_examples=5, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


small_rationals = st.fractions(min_value=-20, max_value=20, max_denominator=60)
unit_interval = st.fractions(min_value=0, max_value=1, max_denominator=200).filter(lambda x: 0 < x < 1)
negative_unit_interval = st.fractions(min_value=-1, max_value=0, max_denominator=200).filter(lambda x: -1 < x < 0)


@st.composite
def rational_series(draw, min_order: int = 2, max_order: int = 8) -> SeriesPoly:
    order = draw(st.integers(min_value=min_order, max_value=max_order))
    coeffs = draw(st.lists(small_rationals, min_size=order + 1, max_size=order + 1))
    return SeriesPoly.from_coeffs(coeffs)


@st.composite
def zero_constant_series(draw, order: int = 5) -> SeriesPoly:
    rest = draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=8), min_size=order, max_size=order))
    return SeriesPoly.from_coeffs([Fraction(0)] + rest)


@pytest.fixture(scope="session")
def e_series() -> SeriesPoly:
    return KellerService.e_series(10)


@pytest.fixture
def inverse_y_series() -> SeriesPoly:
    """G(y) = 1/y."""
    return SeriesPoly.from_coeffs([0, 1, 0, 0, 0])


@pytest.fixture
def constant_series() -> SeriesPoly:
    return SeriesPoly.from_coeffs([1, 0, 0, 0, 0, 0])
