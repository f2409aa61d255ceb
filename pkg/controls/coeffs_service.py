"""Business logic for the Maclaurin coefficients e_n of (1+x)^(1/x)/e.

Exact values come from the finite Stirling double sum; the infinite series
representation and the monotonicity gap series are numeric cross-checks.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Literal, Optional, Tuple

from modules.config import DEFAULT_PRECISION_BITS, SERIES_TERM_CAP
from modules.errors import DomainError, TruncationError, VerificationError
from modules.exactnum import factorial, stirling1
from modules.highprec import e_inverse, rational_interval, scale_interval
from modules.models import CoeffRecord, FloatInterval, decimal_str

logger = logging.getLogger(__name__)

BfileKind = Literal["numerators", "denominators"]


def _require_index(n: int, minimum: int = 0) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < minimum:
        raise DomainError(f"index must be an integer >= {minimum}, got {n!r}")


@lru_cache(maxsize=None)
def _e_closed_form(n: int) -> Fraction:
    total = Fraction(0)
    for k in range(n + 1):
        s = stirling1(n + k, k)
        if s == 0:
            continue
        outer = Fraction((-1) ** (n + k) * s, factorial(n + k))
        # 1/(m-k)! 在 m < k 時視為 0，故內層從 m = k 開始
        inner = sum((Fraction((-1) ** m, factorial(m - k)) for m in range(k, n + 1)), Fraction(0))
        total += outer * inner
    return (-1) ** n * total


class CoeffService:
    """係數 e_n、f_n 的業務邏輯層。"""

    # ============ Exact Coefficients ============
    @staticmethod
    def e_closed_form(n: int) -> Fraction:
        """e_n from the finite double sum over S1(n+k, k); e_0 = 1."""
        _require_index(n)
        return _e_closed_form(n)

    @staticmethod
    def f_coeff(n: int) -> Fraction:
        """f_n = (-1)^n e_n."""
        _require_index(n)
        return (-1) ** n * _e_closed_form(n)

    @staticmethod
    def coeff_records(N: int) -> List[CoeffRecord]:
        _require_index(N)
        return [
            CoeffRecord(n=n, e_n=_e_closed_form(n), f_n=(-1) ** n * _e_closed_form(n))
            for n in range(N + 1)
        ]

    # ============ Numeric Series ============
    @staticmethod
    def e_series_numeric(n: int, digits: int, precision_bits: Optional[int] = None) -> FloatInterval:
        """e^(-1) Σ_{k>=1} S1(n+k, k)/(n+k)!, truncated adaptively.

        Every term has sign (-1)^n and the terms shrink roughly like 1/k!, so
        the tail past the stopping term is below that term. The interval is
        widened by the stopping threshold on both sides to cover it.
        """
        _require_index(n, 1)
        _require_index(digits, 1)
        bits = precision_bits or max(DEFAULT_PRECISION_BITS, math.ceil(digits * 3.33) + 32)
        threshold = Fraction(1, 10 ** (digits + 10))

        running = Fraction(0)
        for k in range(1, SERIES_TERM_CAP + 1):
            term = Fraction(stirling1(n + k, k), factorial(n + k))
            running += term
            if running != 0 and abs(term) < threshold * abs(running):
                logger.info(f"[CoeffService] e_{n} series truncated after {k} terms")
                break
        else:
            raise TruncationError("series truncation cap exceeded")

        allowance = threshold * abs(running)
        inverse = e_inverse(bits)
        lower = scale_interval(running - allowance, inverse, bits)
        upper = scale_interval(running + allowance, inverse, bits)
        return FloatInterval(lo=lower.lo, hi=upper.hi, precision_bits=bits)

    @staticmethod
    def f_gap_exact(n: int) -> Fraction:
        _require_index(n, 1)
        return CoeffService.f_coeff(n) - CoeffService.f_coeff(n + 1)

    @staticmethod
    def f_monotonicity_gap(n: int, terms: int = 80, precision_bits: int = DEFAULT_PRECISION_BITS) -> FloatInterval:
        """f_n - f_{n+1} = (-1)^n e^(-1) Σ_{i>=1} [S1(n+i, i) + S1(n+i, i-1)]/(n+i+1)!.

        The second Stirling index pair follows from the recurrence
        S1(n+i+1, i) = -(n+i) S1(n+i, i) + S1(n+i, i-1).
        """
        _require_index(n, 1)
        _require_index(terms, 1)
        total = Fraction(0)
        for i in range(1, terms + 1):
            total += Fraction(stirling1(n + i, i) + stirling1(n + i, i - 1), factorial(n + i + 1))
        gap = scale_interval((-1) ** n * total, e_inverse(precision_bits), precision_bits)

        if not gap.lo > 0:
            raise VerificationError(f"gap series for f_{n} - f_{n + 1} is not positive: [{gap.lo}, {gap.hi}]")
        if not CoeffService.f_gap_exact(n) > 0:
            raise VerificationError(f"f_{n} <= f_{n + 1}")
        return gap

    @staticmethod
    def lemma_one_chain(N: int) -> List[Fraction]:
        """檢查 f_1 > f_2 > ... > f_{N+1} > 0，回傳各差值。"""
        _require_index(N, 1)
        gaps = []
        for n in range(1, N + 1):
            f_n, f_next = CoeffService.f_coeff(n), CoeffService.f_coeff(n + 1)
            if not f_n > f_next > 0:
                raise VerificationError(f"strict decrease fails at n = {n}: f_n = {f_n}, f_(n+1) = {f_next}")
            gaps.append(f_n - f_next)
        return gaps

    @staticmethod
    def f_limit_probe(N: int) -> List[Tuple[int, str]]:
        """f_1..f_N to 15 significant digits; the limit value itself is not asserted."""
        _require_index(N, 1)
        table = []
        previous = None
        for n in range(1, N + 1):
            f_n = CoeffService.f_coeff(n)
            if previous is not None and not f_n < previous:
                raise VerificationError(f"f_{n} does not decrease")
            previous = f_n
            table.append((n, decimal_str(rational_interval(f_n, 96).mid(), 15)))
        return table

    # ============ OEIS b-files ============
    @staticmethod
    def export_bfile(N: int, which: BfileKind = "numerators") -> str:
        """|numerator(e_n)| (A055505) or denominator(e_n) (A055535), n = 0..N."""
        _require_index(N)
        if which not in ("numerators", "denominators"):
            raise DomainError(f"which must be numerators or denominators, got {which!r}")
        lines = []
        for n in range(N + 1):
            e_n = _e_closed_form(n)
            value = abs(e_n.numerator) if which == "numerators" else e_n.denominator
            lines.append(f"{n} {value}\n")
        return "".join(lines)

    @staticmethod
    def parse_bfile(text: str) -> List[Tuple[int, int]]:
        pairs = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"malformed b-file line: {line!r}")
            pairs.append((int(parts[0]), int(parts[1])))
        return pairs

    @staticmethod
    def rationals_from_bfiles(numerators: str, denominators: str) -> List[Fraction]:
        """由兩個 b-file 重建帶號 e_n（符號為 (-1)^n）。"""
        nums = CoeffService.parse_bfile(numerators)
        dens = CoeffService.parse_bfile(denominators)
        if [n for n, _ in nums] != [n for n, _ in dens]:
            raise DomainError("b-files do not share the same index range")
        return [Fraction((-1) ** n * p, q) for (n, p), (_, q) in zip(nums, dens)]


e_closed_form = CoeffService.e_closed_form
f_coeff = CoeffService.f_coeff
e_series_numeric = CoeffService.e_series_numeric
f_monotonicity_gap = CoeffService.f_monotonicity_gap
f_limit_probe = CoeffService.f_limit_probe
export_bfile = CoeffService.export_bfile
