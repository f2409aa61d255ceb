"""Arbitrary-precision outward-rounded evaluation.

Certified enclosure of e, direct evaluation of e(x), of G(y) for truncated
series, of the Keller differences, and convergence probes. Interval work is
done in ``mpmath.iv``; rationals are rounded outward with ``mpmath.libmp``.
"""
import csv
import io
import logging
import threading
from contextlib import contextmanager
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, List, Optional, Sequence, Union

import mpmath
from mpmath import iv
from mpmath.libmp import from_rational, round_ceiling, round_floor

from modules.config import DEFAULT_PRECISION_BITS
from modules.errors import DomainError
from modules.exactnum import require_rational
from modules.models import DECIMAL_DIGITS, FloatInterval, ProbeRow, SeriesPoly, decimal_str

logger = logging.getLogger(__name__)

# mpmath 的精度是全域狀態，切換時需持鎖
_PRECISION_LOCK = threading.RLock()

# 內部保護位元
GUARD_BITS = 16

Numeric = Union[Fraction, int, str, mpmath.mpf, FloatInterval]


@contextmanager
def _working_precision(bits: int) -> Iterator[None]:
    with _PRECISION_LOCK:
        saved_iv, saved_mp = iv.prec, mpmath.mp.prec
        iv.prec = bits
        mpmath.mp.prec = bits
        try:
            yield
        finally:
            iv.prec, mpmath.mp.prec = saved_iv, saved_mp


def _check_bits(precision_bits: int) -> None:
    if precision_bits < 2:
        raise DomainError(f"precision_bits must be >= 2, got {precision_bits}")


# ============ Conversions ============
def rational_interval(value, precision_bits: int) -> FloatInterval:
    """[floor(value), ceil(value)] at the given precision."""
    r = require_rational(value)
    lo = from_rational(r.numerator, r.denominator, precision_bits, round_floor)
    hi = from_rational(r.numerator, r.denominator, precision_bits, round_ceiling)
    return FloatInterval(lo=mpmath.mp.make_mpf(lo), hi=mpmath.mp.make_mpf(hi), precision_bits=precision_bits)


def _to_iv(value: Numeric, precision_bits: int):
    """任意數值輸入轉成 iv 區間（需在 _working_precision 內呼叫）。"""
    if isinstance(value, FloatInterval):
        return iv.mpf([value.lo, value.hi])
    if isinstance(value, mpmath.mpf):
        return iv.mpf([value, value])
    fi = rational_interval(value, precision_bits)
    return iv.mpf([fi.lo, fi.hi])


def _from_iv(value, precision_bits: int) -> FloatInterval:
    lo, hi = value._mpi_
    return FloatInterval(lo=mpmath.mp.make_mpf(lo), hi=mpmath.mp.make_mpf(hi), precision_bits=precision_bits)


def interval_of(value: Numeric, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    if isinstance(value, FloatInterval):
        return value
    if isinstance(value, mpmath.mpf):
        return FloatInterval(lo=value, hi=value, precision_bits=precision_bits)
    return rational_interval(value, precision_bits)


# ============ Constant e ============
@lru_cache(maxsize=64)
def enclose_constant_e(precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """Enclosure of e from Σ_{k<=K} 1/k! with tail bound 2/(K+1)!.

    Width <= 2^(2 - precision_bits); endpoints carry two guard bits.
    """
    if precision_bits < 16:
        raise DomainError(f"precision_bits must be >= 16, got {precision_bits}")
    target = precision_bits + 2
    partial = Fraction(0)
    k, k_fact = 0, 1
    while True:
        partial += Fraction(1, k_fact)
        next_fact = k_fact * (k + 1)
        # 尾項 e - S_K < 2/(K+1)!
        if next_fact >= 1 << (target + 1):
            break
        k, k_fact = k + 1, next_fact
    tail = Fraction(2, next_fact)
    lo = from_rational(partial.numerator, partial.denominator, target, round_floor)
    upper = partial + tail
    hi = from_rational(upper.numerator, upper.denominator, target, round_ceiling)
    logger.debug(f"[HighPrec] e enclosed with {k + 1} factorial terms at {precision_bits} bits")
    return FloatInterval(lo=mpmath.mp.make_mpf(lo), hi=mpmath.mp.make_mpf(hi), precision_bits=precision_bits)


def e_inverse(precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    e = enclose_constant_e(precision_bits)
    with _working_precision(precision_bits + GUARD_BITS):
        return _from_iv(1 / iv.mpf([e.lo, e.hi]), precision_bits)


def scale_interval(multiplier, interval: FloatInterval, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """Exact rational times an interval, rounded outward."""
    work = precision_bits + GUARD_BITS
    with _working_precision(work):
        m = _to_iv(require_rational(multiplier), work)
        return _from_iv(m * iv.mpf([interval.lo, interval.hi]), precision_bits)


def times_e(multiplier, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """multiplier·e 的外捨入區間（EMultiple 的數值呈現）。"""
    return scale_interval(multiplier, enclose_constant_e(precision_bits), precision_bits)


# ============ e(x) ============
def eval_e_of_x(x, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """(1+x)^(1/x) for x > -1, x != 0; e for x = 0."""
    _check_bits(precision_bits)
    x = require_rational(x, "x")
    if x <= -1:
        raise DomainError(f"e(x) needs x > -1, got {x}")
    if x == 0:
        return enclose_constant_e(precision_bits)
    work = precision_bits + GUARD_BITS
    with _working_precision(work):
        base = _to_iv(1 + x, work)
        inv_x = _to_iv(1 / x, work)
        return _from_iv(iv.exp(inv_x * iv.log(base)), precision_bits)


# ============ Keller Differences ============
def _cancellation_guard(y: Fraction) -> int:
    # 兩個約 e·y 的量相減會損失約 log2(y) 位
    return GUARD_BITS + max(abs(y).numerator.bit_length() - abs(y).denominator.bit_length(), 0)


def _power_term(z: Fraction, work: int):
    """(1 + 1/z)^z，以 exp(z·log((z+1)/z)) 計算。"""
    return iv.exp(_to_iv(z, work) * iv.log(_to_iv((z + 1) / z, work)))


def eval_keller_difference(y, c=0, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """(y+1)(1 + 1/(y+c))^(y+c) - y(1 + 1/(y+c-1))^(y+c-1)."""
    _check_bits(precision_bits)
    y = require_rational(y, "y")
    c = require_rational(c, "c")
    z = y + c
    if z <= 1:
        raise DomainError(f"Keller difference needs y + c > 1, got y + c = {z}")
    work = precision_bits + _cancellation_guard(y)
    with _working_precision(work):
        first = _to_iv(y + 1, work) * _power_term(z, work)
        second = _to_iv(y, work) * _power_term(z - 1, work)
        return _from_iv(first - second, precision_bits)


def eval_g(a: SeriesPoly, y: Numeric, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """G(y) = Σ a_k / y^k of a truncated series (times e when e-scaled)."""
    _check_bits(precision_bits)
    work = precision_bits + GUARD_BITS
    with _working_precision(work):
        return _from_iv(_g_iv(a, _to_iv(y, work), work), precision_bits)


def _g_iv(a: SeriesPoly, y_iv, work: int):
    inv = 1 / y_iv
    acc = _to_iv(a.coeffs[-1], work)
    for coeff in reversed(a.coeffs[:-1]):
        acc = acc * inv + _to_iv(coeff, work)
    if a.scaled_by_e:
        e = enclose_constant_e(work)
        acc = acc * iv.mpf([e.lo, e.hi])
    return acc


def eval_series_difference(a: SeriesPoly, y, c=0, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
    """(y+1)·G(y+c) - y·G(y+c-1) by direct summation of the truncated series."""
    _check_bits(precision_bits)
    y = require_rational(y, "y")
    c = require_rational(c, "c")
    z = y + c
    if z <= 1:
        raise DomainError(f"series difference needs y + c > 1, got y + c = {z}")
    work = precision_bits + _cancellation_guard(y)
    with _working_precision(work):
        first = _to_iv(y + 1, work) * _g_iv(a, _to_iv(z, work), work)
        second = _to_iv(y, work) * _g_iv(a, _to_iv(z - 1, work), work)
        return _from_iv(first - second, precision_bits)


# ============ Convergence Probes ============
DifferenceFn = Callable[[Fraction, Fraction, int], FloatInterval]


def convergence_probe(
    c,
    y_values: Sequence,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    difference: Optional[DifferenceFn] = None,
) -> List[ProbeRow]:
    """|difference(y, c) - e| per y plus the log-log slope between neighbours."""
    c = require_rational(c, "c")
    ys = [require_rational(y, "y") for y in y_values]
    if any(b <= a for a, b in zip(ys, ys[1:])):
        raise DomainError("y_values must be strictly increasing")
    difference = difference or eval_keller_difference
    e_mid = enclose_constant_e(precision_bits).mid()

    rows: List[ProbeRow] = []
    prev: Optional[ProbeRow] = None
    for y in ys:
        value = difference(y, c, precision_bits)
        with _working_precision(precision_bits + GUARD_BITS):
            err = abs(value.mid() - e_mid)
            slope = None
            if prev is not None and err > 0 and prev.abs_error > 0:
                ratio = y / prev.y
                slope = mpmath.log(err / prev.abs_error) / mpmath.log(mpmath.mpf(ratio.numerator) / ratio.denominator)
        row = ProbeRow(y=y, abs_error=err, slope=slope)
        logger.debug(f"[HighPrec] probe y={y} err={decimal_str(err, 8)} slope={decimal_str(slope, 6)}")
        rows.append(row)
        prev = row
    return rows


def probe_to_csv(rows: Sequence[ProbeRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["y", "abs_error", "slope"])
    for row in rows:
        y = rational_interval(row.y, 128).mid()
        writer.writerow([
            decimal_str(y, DECIMAL_DIGITS),
            decimal_str(row.abs_error, DECIMAL_DIGITS),
            decimal_str(row.slope, DECIMAL_DIGITS) or "",
        ])
    return buffer.getvalue()


# ============ Inverse-Power Sums ============
def eval_inverse_powers(
    constant,
    coeffs: Sequence,
    first_power: int,
    y: Numeric,
    shift=0,
    scaled_by_e: bool = False,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> FloatInterval:
    """constant + Σ_j coeffs[j] / (y + shift)^(first_power + j), times e when scaled."""
    _check_bits(precision_bits)
    work = precision_bits + GUARD_BITS
    with _working_precision(work):
        z = _to_iv(y, work) + _to_iv(require_rational(shift, "shift"), work)
        inv = 1 / z
        poly = iv.mpf(0)
        for coeff in reversed(list(coeffs)):
            poly = poly * inv + _to_iv(coeff, work)
        total = _to_iv(constant, work) + poly * inv ** first_power
        if scaled_by_e:
            e = enclose_constant_e(work)
            total = total * iv.mpf([e.lo, e.hi])
        return _from_iv(total, precision_bits)
