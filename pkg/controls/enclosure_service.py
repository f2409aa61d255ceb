"""Exact partial sums e_n(x) = e·(1 + Σ (-1)^k f_k x^k) and the sandwich
bounds they give for (1+x)^(1/x) on (-1, 1)."""
import logging
from fractions import Fraction
from typing import Dict, List, Sequence

from controls.coeffs_service import CoeffService
from modules.config import DEFAULT_PRECISION_BITS
from modules.errors import DomainError
from modules.exactnum import require_rational
from modules.highprec import eval_e_of_x, rational_interval, times_e
from modules.models import BoundReport, EMultiple, decimal_str, mpf_to_fraction

logger = logging.getLogger(__name__)


def _require_x(x, low: Fraction = Fraction(-1), high: Fraction = Fraction(1)) -> Fraction:
    x = require_rational(x, "x")
    if not low < x < high:
        raise DomainError(f"x must lie in ({low}, {high}), got {x}")
    return x


def _require_order(n: int, minimum: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < minimum:
        raise DomainError(f"order must be an integer >= {minimum}, got {n!r}")


class EnclosureService:
    """部分和 e_n(x) 與夾擠界的業務邏輯層。"""

    # ============ Partial Sums ============
    @staticmethod
    def partial_sum_chain(x, n: int) -> List[Fraction]:
        """m_0(x), ..., m_n(x) with m_j = e_j(x)/e."""
        x = _require_x(x)
        _require_order(n, 0)
        chain = [Fraction(1)]
        power = Fraction(1)
        for k in range(1, n + 1):
            power *= x
            chain.append(chain[-1] + (-1) ** k * CoeffService.f_coeff(k) * power)
        return chain

    @staticmethod
    def partial_sum_multiplier(x, n: int) -> Fraction:
        """1 + Σ_{k=1}^{n} (-1)^k f_k x^k, i.e. e_n(x)/e."""
        return EnclosureService.partial_sum_chain(x, n)[-1]

    # ============ Bounds ============
    @staticmethod
    def enclose(x, n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
        """Sandwich for x in (0,1), lower bound for x in (-1,0), exact at 0.

        On (0,1) the odd-order sums increase to e(x) and the even-order sums
        decrease to it; on (-1,0) all sums increase to e(x).
        """
        x = _require_x(x)
        _require_order(n, 1)
        chain = EnclosureService.partial_sum_chain(x, n)

        if x == 0:
            one = EMultiple(multiplier=1)
            e = times_e(1, precision_bits)
            return BoundReport(
                x=x, order=n, lower=one, upper=one, sided="two",
                numeric_lo=e.lo, numeric_hi=e.hi, precision_bits=precision_bits,
            )

        if x > 0:
            lower_order = n if n % 2 == 1 else n - 1
            upper_order = n if n % 2 == 0 else n - 1
            lower = EMultiple(multiplier=chain[lower_order])
            upper = EMultiple(multiplier=chain[upper_order])
            return BoundReport(
                x=x, order=n, lower=lower, upper=upper, sided="two",
                numeric_lo=times_e(lower.multiplier, precision_bits).lo,
                numeric_hi=times_e(upper.multiplier, precision_bits).hi,
                precision_bits=precision_bits,
            )

        # x ∈ (-1,0)：只有下界；附上非認證的 e(x) 估計值供顯示
        lower = EMultiple(multiplier=chain[n])
        return BoundReport(
            x=x, order=n, lower=lower, upper=None, sided="lower",
            numeric_lo=times_e(lower.multiplier, precision_bits).lo, numeric_hi=None,
            precision_bits=precision_bits,
            estimate=eval_e_of_x(x, precision_bits).mid(),
        )

    @staticmethod
    def enclosure_defect(x, n: int) -> Fraction:
        """upper.multiplier - lower.multiplier of enclose(x, n); equals f_n x^n."""
        x = _require_x(x, low=Fraction(0))
        _require_order(n, 1)
        chain = EnclosureService.partial_sum_chain(x, n)
        lower_order = n if n % 2 == 1 else n - 1
        upper_order = n if n % 2 == 0 else n - 1
        return chain[upper_order] - chain[lower_order]

    @staticmethod
    def classical_sandwich(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> BoundReport:
        """e(1 - x/2) < (1+x)^(1/x) < e(1 - x/2 + 11x²/24) on (0,1)."""
        x = _require_x(x, low=Fraction(0))
        return EnclosureService.enclose(x, 2, precision_bits)

    # ============ Empirical Convergence ============
    @staticmethod
    def approach_table(x, orders: Sequence[int], precision_bits: int = DEFAULT_PRECISION_BITS) -> List[Dict[str, str]]:
        """Non-certified e(x) - e_n(x) per order; used where no tail bound exists."""
        x = _require_x(x)
        if not orders:
            return []
        target = eval_e_of_x(x, precision_bits).mid()
        chain = EnclosureService.partial_sum_chain(x, max(orders))
        rows = []
        for n in orders:
            approx = times_e(chain[n], precision_bits).mid()
            gap = mpf_to_fraction(target) - mpf_to_fraction(approx)
            rows.append({"n": str(n), "gap": decimal_str(rational_interval(gap, 96).mid())})
        logger.info(f"[EnclosureService] approach table for x={x} over {len(rows)} orders")
        return rows


partial_sum_multiplier = EnclosureService.partial_sum_multiplier
enclose = EnclosureService.enclose
enclosure_defect = EnclosureService.enclosure_defect
