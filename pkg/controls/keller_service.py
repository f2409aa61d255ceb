"""Keller-type asymptotic expansions of (y+1)·G(y+c) - y·G(y+c-1).

For g(x) = Σ a_k x^k and G(y) = g(1/y) the difference expands as
a_0 + Σ_{k>=2} b_k / (y+c)^k. Coefficients are kept signed so that one
evaluation path serves the plain (c = 0) and the shifted form.
"""
import logging
import math
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Union

from controls.coeffs_service import CoeffService
from modules.config import DEFAULT_PRECISION_BITS
from modules.errors import DomainError
from modules.exactnum import binomial, require_rational
from modules.highprec import eval_inverse_powers, eval_series_difference, interval_of
from modules.models import FloatInterval, KellerExpansion, Scalar, SeriesPoly, mpf_to_fraction

logger = logging.getLogger(__name__)

# ϱ 未知時的有效區門檻（對應 ϱ >= 1）
DEFAULT_VALIDITY_LOWER_Y = Fraction(2)

DirectFn = Callable[[Fraction, Fraction, int], FloatInterval]


def _require_K(K: int) -> None:
    if not isinstance(K, int) or isinstance(K, bool) or K < 2:
        raise DomainError(f"expansion order K must be an integer >= 2, got {K!r}")


def _require_series_order(a: SeriesPoly, K: int) -> None:
    if a.order < K:
        raise DomainError(f"series of order {a.order} is too short for an expansion of order {K}")


class KellerService:
    """Keller 型展開的業務邏輯層。"""

    # ============ Coefficient Triangle ============
    @staticmethod
    def keller_row(k: int) -> List[int]:
        """C(k,0), C(k,1), ..., C(k,k-2), C(k,k-1) - 1 multiplying a_1..a_k."""
        if not isinstance(k, int) or isinstance(k, bool) or k < 2:
            raise DomainError(f"Keller row index must be an integer >= 2, got {k!r}")
        return [binomial(k, i - 1) for i in range(1, k)] + [binomial(k, k - 1) - 1]

    @staticmethod
    def plain_numerator(a: SeriesPoly, k: int) -> Fraction:
        """Σ_{i=1}^{k-1} C(k, i-1) a_i + (C(k, k-1) - 1) a_k (enters with a minus sign)."""
        row = KellerService.keller_row(k)
        return sum((row[i - 1] * a.coefficient(i) for i in range(1, k + 1)), Fraction(0))

    @staticmethod
    def shift_numerator(a: SeriesPoly, c, k: int) -> Fraction:
        """c·Σ_{i=1}^{k-1} C(k-1, i-1) a_i - plain_numerator(a, k)."""
        c = require_rational(c, "c")
        shifted = sum((binomial(k - 1, i - 1) * a.coefficient(i) for i in range(1, k)), Fraction(0))
        return c * shifted - KellerService.plain_numerator(a, k)

    @staticmethod
    def validity_threshold(a: SeriesPoly) -> Fraction:
        """1 + max{1, 1/ϱ}; 2 when ϱ is not known."""
        if a.radius_hint is None:
            return DEFAULT_VALIDITY_LOWER_Y
        return 1 + max(Fraction(1), 1 / a.radius_hint)

    # ============ Expansions ============
    @staticmethod
    def expand_plain(a: SeriesPoly, K: int) -> KellerExpansion:
        _require_K(K)
        _require_series_order(a, K)
        bks = [-KellerService.plain_numerator(a, k) for k in range(2, K + 1)]
        return KellerExpansion(
            a0=a.coefficient(0), bks=bks, shift=Fraction(0), K=K,
            validity_lower_y=KellerService.validity_threshold(a), scaled_by_e=a.scaled_by_e,
        )

    @staticmethod
    def expand_shifted(a: SeriesPoly, c, K: int) -> KellerExpansion:
        _require_K(K)
        _require_series_order(a, K)
        c = require_rational(c, "c")
        bks = [KellerService.shift_numerator(a, c, k) for k in range(2, K + 1)]
        return KellerExpansion(
            a0=a.coefficient(0), bks=bks, shift=c, K=K,
            validity_lower_y=KellerService.validity_threshold(a), scaled_by_e=a.scaled_by_e,
        )

    @staticmethod
    def presented_numerators(expansion: KellerExpansion) -> List[Fraction]:
        """Numerators as the expansions are usually written: under a global
        minus for c = 0, under a plus for the shifted form."""
        if expansion.shift == 0:
            return [-b for b in expansion.bks]
        return list(expansion.bks)

    @staticmethod
    def expansion_eval(
        expansion: KellerExpansion,
        y,
        precision_bits: int = DEFAULT_PRECISION_BITS,
    ) -> FloatInterval:
        """a_0 + Σ_{k=2}^{K} b_k/(y+c)^k, outward rounded."""
        threshold = expansion.validity_lower_y
        if threshold is not None:
            low = mpf_to_fraction(interval_of(y, precision_bits).lo)
            # y 與平移後的 y + c 都必須在門檻之上
            if not (low > threshold and low + expansion.shift > threshold):
                raise DomainError(f"y = {low} is outside stated validity region (y > {threshold})")
        return eval_inverse_powers(
            expansion.a0, expansion.bks, 2, y,
            shift=expansion.shift, scaled_by_e=expansion.scaled_by_e, precision_bits=precision_bits,
        )

    @staticmethod
    def keller_limit(a: Union[SeriesPoly, KellerExpansion]) -> Scalar:
        """L1 = L2 = a_0, whatever the shift c."""
        if isinstance(a, KellerExpansion):
            return a.a0_scalar()
        return a.scalar(0)

    @staticmethod
    def remainder_order(a: SeriesPoly, c, K: int, search: int = 3) -> Optional[int]:
        """First k in K+1..K+search with b_k(c) != 0, None if all vanish.

        For the e-series at c = 0 the difference is even in y, so every odd
        b_k is zero and the remainder starts one order later.
        """
        _require_K(K)
        _require_series_order(a, K + search)
        c = require_rational(c, "c")
        for k in range(K + 1, K + search + 1):
            if KellerService.shift_numerator(a, c, k) != 0:
                return k
        return None

    # ============ Series Builders ============
    @staticmethod
    def e_series(order: int) -> SeriesPoly:
        """a_k = e·e_k, the Maclaurin series of (1+x)^(1/x); radius 1."""
        if order < 0:
            raise DomainError(f"order must be nonnegative, got {order}")
        coeffs = [CoeffService.e_closed_form(k) for k in range(order + 1)]
        return SeriesPoly.from_coeffs(coeffs, radius_hint=Fraction(1), scaled_by_e=True)

    # ============ Numeric Consistency ============
    @staticmethod
    def discrepancies(
        a: SeriesPoly,
        c,
        K: int,
        exponents: Sequence[int],
        precision_bits: int = DEFAULT_PRECISION_BITS,
        direct: Optional[DirectFn] = None,
    ) -> List[Fraction]:
        """|D(y) - expansion(y)| at y = 2^j, D evaluated directly."""
        c = require_rational(c, "c")
        expansion = KellerService.expand_shifted(a, c, K)
        direct = direct or (lambda y, shift, bits: eval_series_difference(a, y, shift, bits))
        out = []
        for j in exponents:
            y = Fraction(2) ** j
            d = direct(y, c, precision_bits)
            approx = KellerService.expansion_eval(expansion, y, precision_bits)
            out.append(abs(mpf_to_fraction(d.mid()) - mpf_to_fraction(approx.mid())))
        return out

    @staticmethod
    def discrepancy_log2_ratios(
        a: SeriesPoly,
        c,
        K: int,
        exponents: Sequence[int],
        precision_bits: int = DEFAULT_PRECISION_BITS,
        direct: Optional[DirectFn] = None,
    ) -> List[float]:
        """log2 of the shrink factor of the discrepancy per doubling of y; ≈ K + 1."""
        values = KellerService.discrepancies(a, c, K, exponents, precision_bits, direct)
        if any(v == 0 for v in values):
            raise DomainError("discrepancy vanished; precision too low or expansion exact")
        ratios = [math.log2(prev / cur) for prev, cur in zip(values, values[1:])]
        logger.info(f"[KellerService] K={K} c={c} doubling ratios (log2): {[round(r, 3) for r in ratios]}")
        return ratios


keller_row = KellerService.keller_row
expand_plain = KellerService.expand_plain
expand_shifted = KellerService.expand_shifted
expansion_eval = KellerService.expansion_eval
keller_limit = KellerService.keller_limit
