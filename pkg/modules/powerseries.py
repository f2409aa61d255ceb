"""Truncated formal power series over exact rationals.

Every value carries its truncation order; binary operations truncate to the
smaller order so that no coefficient beyond validity is ever reported.
"""
import logging
from fractions import Fraction
from typing import List

from modules.errors import DomainError
from modules.models import SeriesPoly

logger = logging.getLogger(__name__)


def _require_plain(*series: SeriesPoly) -> None:
    for s in series:
        if s.scaled_by_e:
            raise DomainError("series arithmetic works on rational coefficients only")


# ============ Basic Series ============
def ps_constant(value, order: int) -> SeriesPoly:
    return SeriesPoly.from_coeffs([value] + [0] * order)


def ps_x(order: int) -> SeriesPoly:
    """x 本身（order >= 1）。"""
    if order < 1:
        raise DomainError("x needs truncation order >= 1")
    return SeriesPoly.from_coeffs([0, 1] + [0] * (order - 1))


def ps_log1p(order: int) -> SeriesPoly:
    """ln(1+x) = Σ (-1)^{k+1} x^k / k."""
    if order < 0:
        raise DomainError(f"order must be nonnegative, got {order}")
    coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, order + 1)]
    return SeriesPoly.from_coeffs(coeffs)


# ============ Arithmetic ============
def ps_add(a: SeriesPoly, b: SeriesPoly) -> SeriesPoly:
    _require_plain(a, b)
    n = min(a.order, b.order)
    return SeriesPoly.from_coeffs([a.coeffs[k] + b.coeffs[k] for k in range(n + 1)])


def ps_sub(a: SeriesPoly, b: SeriesPoly) -> SeriesPoly:
    _require_plain(a, b)
    n = min(a.order, b.order)
    return SeriesPoly.from_coeffs([a.coeffs[k] - b.coeffs[k] for k in range(n + 1)])


def ps_scale(a: SeriesPoly, factor) -> SeriesPoly:
    return a.model_copy(update={"coeffs": tuple(c * Fraction(factor) for c in a.coeffs)})


def ps_mul(a: SeriesPoly, b: SeriesPoly) -> SeriesPoly:
    """Cauchy 乘積，截斷於 min(a.order, b.order)。"""
    _require_plain(a, b)
    n = min(a.order, b.order)
    out: List[Fraction] = []
    for k in range(n + 1):
        out.append(sum((a.coeffs[i] * b.coeffs[k - i] for i in range(k + 1)), Fraction(0)))
    return SeriesPoly.from_coeffs(out)


def ps_exp(a: SeriesPoly) -> SeriesPoly:
    """exp(a)，需 a 的常數項為 0。

    b = exp(a) 滿足 b' = a' b，故 n·b_n = Σ_{k=1}^{n} k·a_k·b_{n-k}。
    """
    _require_plain(a)
    if a.coeffs[0] != 0:
        raise DomainError("constant term must vanish")
    b: List[Fraction] = [Fraction(1)]
    for n in range(1, a.order + 1):
        acc = sum((k * a.coeffs[k] * b[n - k] for k in range(1, n + 1)), Fraction(0))
        b.append(acc / n)
    return SeriesPoly.from_coeffs(b)


def ps_shift_down(a: SeriesPoly) -> SeriesPoly:
    """a(x)/x，以索引平移完成（不做除法），需常數項為 0。"""
    _require_plain(a)
    if a.coeffs[0] != 0:
        raise DomainError("shift-down needs a vanishing constant term")
    if a.order < 1:
        raise DomainError("shift-down needs truncation order >= 1")
    return SeriesPoly.from_coeffs(a.coeffs[1:])


# ============ Oracle ============
def oracle_e_coeffs(order: int) -> SeriesPoly:
    """1 + Σ e_k x^k = exp(ln(1+x)/x - 1)，作為 e_k 的獨立檢驗來源。"""
    if order < 0:
        raise DomainError(f"order must be nonnegative, got {order}")
    exponent = ps_sub(ps_shift_down(ps_log1p(order + 1)), ps_constant(1, order))
    result = ps_exp(exponent)
    logger.debug(f"[PowerSeries] oracle coefficients computed up to order {order}")
    return result
