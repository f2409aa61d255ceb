"""Exact integer/rational arithmetic: rationals, factorials, binomials and
the signed Stirling numbers of the first kind."""
import logging
import math
import re
import threading
from fractions import Fraction
from typing import List, Union

from modules.errors import DomainError, RationalFormatError

logger = logging.getLogger(__name__)

# 有理數一律使用 Fraction（建構時即約分、分母恆正）
ExactRational = Fraction

RationalLike = Union[Fraction, int]

# 文字格式：可選負號（ASCII 或 U+2212）、十進位整數、可選 "/正整數"
_RATIONAL_RE = re.compile(r"^(?P<sign>[-−]?)(?P<num>\d+)(?:/(?P<den>\d+))?$")


# ============ Rational Text Format ============
def parse_rational(text: str) -> Fraction:
    """Parse "-7/16", "−7/16", "3" into a Fraction; anything else is rejected."""
    match = _RATIONAL_RE.match(text.strip()) if isinstance(text, str) else None
    if not match:
        raise RationalFormatError(f"not a rational: {text!r}")
    den = int(match.group("den") or 1)
    if den == 0:
        raise RationalFormatError(f"zero denominator: {text!r}")
    value = Fraction(int(match.group("num")), den)
    return -value if match.group("sign") else value


def format_rational(value: RationalLike) -> str:
    """Canonical text form: "p/q" in lowest terms, or "p" when q = 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def require_rational(value, name: str = "value") -> Fraction:
    """Accept int/Fraction/rational text; floats are refused, never converted."""
    if isinstance(value, bool):
        raise DomainError(f"{name} must be rational, got bool")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise DomainError(f"{name} must be an exact rational, got {type(value).__name__}")


# ============ Factorials & Binomials ============
def factorial(n: int) -> int:
    if n < 0:
        raise DomainError(f"factorial of negative integer {n}")
    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    """C(n, k), 0 outside 0 <= k <= n."""
    if n < 0:
        raise DomainError(f"binomial with negative n = {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


# ============ Stirling Numbers of the First Kind ============
class StirlingTable:
    """帶號第一類 Stirling 數三角表，依需求成長。

    S1(p+1, q) = -p·S1(p, q) + S1(p, q-1)，S1(0,0) = 1，S1(p,0) = 0 (p >= 1)。
    讀取不加鎖；成長時以鎖保護，只有持鎖者會 append 新列。
    """

    def __init__(self, capacity: int = 1):
        self._rows: List[List[int]] = [[1]]
        self._lock = threading.Lock()
        if capacity > 0:
            self.ensure(capacity)

    @property
    def capacity(self) -> int:
        return len(self._rows) - 1

    def ensure(self, p_max: int) -> None:
        """確保表格至少包含第 p_max 列。"""
        if p_max <= self.capacity:
            return
        with self._lock:
            start = len(self._rows)
            while len(self._rows) <= p_max:
                p = len(self._rows) - 1  # 由第 p 列推出第 p+1 列
                prev = self._rows[p]
                row = [0] * (p + 2)
                for q in range(1, p + 2):
                    upper = prev[q] if q <= p else 0
                    row[q] = -p * upper + prev[q - 1]
                self._rows.append(row)
            if len(self._rows) > start:
                logger.debug(f"[StirlingTable] grew to row {len(self._rows) - 1}")

    def get(self, p: int, q: int) -> int:
        if p < 0:
            raise DomainError(f"Stirling index p must be nonnegative, got {p}")
        if q < 0 or q > p:
            return 0
        self.ensure(p)
        return self._rows[p][q]

    def row(self, p: int) -> List[int]:
        """第 p 列 S1(p,0..p) 的副本。"""
        self.ensure(p)
        return list(self._rows[p])


DEFAULT_TABLE = StirlingTable(capacity=64)


def stirling1(p: int, q: int, table: StirlingTable = None) -> int:
    """Signed S1(p, q); 0 when q < 1 or q > p (except S1(0,0) = 1)."""
    return (table or DEFAULT_TABLE).get(p, q)
