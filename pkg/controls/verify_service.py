"""Machine-checked verification of the coefficient, enclosure and Keller claims.

Each check returns a CheckResult; nothing here raises for a failed property.
"""
import logging
import random
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

from controls.coeffs_service import CoeffService
from controls.enclosure_service import EnclosureService
from controls.keller_service import KellerService
from modules.config import DEFAULT_PRECISION_BITS
from modules.errors import ExSeriesError
from modules.highprec import convergence_probe, enclose_constant_e, eval_e_of_x, eval_keller_difference
from modules.models import CheckResult, SeriesPoly, mpf_to_fraction
from modules.powerseries import oracle_e_coeffs

logger = logging.getLogger(__name__)

# 已知的 e_0..e_6（OEIS A055505 / A055535）
KNOWN_E = [
    Fraction(1), Fraction(-1, 2), Fraction(11, 24), Fraction(-7, 16),
    Fraction(2447, 5760), Fraction(-959, 2304), Fraction(238043, 580608),
]

SANDWICH_POSITIVE_X = [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(9, 10)]
SANDWICH_NEGATIVE_X = [Fraction(-1, 10), Fraction(-1, 2), Fraction(-9, 10)]
LIMIT_SHIFTS = [Fraction(-5), Fraction(0), Fraction(1, 2), Fraction(5)]
SOUNDNESS_SHIFTS = [Fraction(0), Fraction(1, 2), Fraction(-2)]


def random_series(rng: random.Random, order: int) -> SeriesPoly:
    """正有理係數的隨機級數：對 c <= 1/2，每個 b_k(c) 皆為負，不會意外消失。"""
    return SeriesPoly.from_coeffs(
        [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(order + 1)]
    )


def interlacing_holds(x: Fraction, max_order: int) -> bool:
    """m_1 < m_3 < ... < (odd) < (even) < ... < m_2 < m_0 for x in (0,1)."""
    chain = EnclosureService.partial_sum_chain(x, max_order)
    odd = chain[1::2]
    even = chain[0::2]
    increasing = all(a < b for a, b in zip(odd, odd[1:]))
    decreasing = all(a > b for a, b in zip(even, even[1:]))
    return increasing and decreasing and max(odd) < min(even)


def increasing_holds(x: Fraction, max_order: int) -> bool:
    chain = EnclosureService.partial_sum_chain(x, max_order)
    return all(a < b for a, b in zip(chain, chain[1:]))


class VerifyService:
    """驗證流程的業務邏輯層。"""

    # ============ Coefficients ============
    @staticmethod
    def check_coefficient_table() -> CheckResult:
        got = [CoeffService.e_closed_form(n) for n in range(len(KNOWN_E))]
        return CheckResult(name="coefficient_table", passed=got == KNOWN_E, detail=f"e_0..e_6 = {[str(g) for g in got]}")

    @staticmethod
    def check_oracle_equivalence(max_n: int) -> CheckResult:
        oracle = oracle_e_coeffs(max_n)
        bad = [n for n in range(max_n + 1) if CoeffService.e_closed_form(n) != oracle.coefficient(n)]
        return CheckResult(name="oracle_equivalence", passed=not bad, detail=f"mismatches at {bad}" if bad else f"n <= {max_n}")

    @staticmethod
    def check_lemma_one(max_n: int) -> CheckResult:
        CoeffService.lemma_one_chain(max_n)
        return CheckResult(name="lemma_one", passed=True, detail=f"f_1 > ... > f_{max_n + 1} > 0")

    @staticmethod
    def check_series_representation(max_n: int = 10, digits: int = 30, precision_bits: int = DEFAULT_PRECISION_BITS) -> CheckResult:
        tolerance = Fraction(1, 10 ** 25)
        worst = Fraction(0)
        for n in range(1, max_n + 1):
            approx = CoeffService.e_series_numeric(n, digits, precision_bits)
            worst = max(worst, abs(mpf_to_fraction(approx.mid()) - CoeffService.e_closed_form(n)))
        return CheckResult(name="series_representation", passed=worst < tolerance, detail=f"max error {float(worst):.3e}")

    # ============ Enclosures ============
    @staticmethod
    def check_sandwich(max_order: int = 12, precision_bits: int = 200) -> CheckResult:
        failures = []
        for x in SANDWICH_POSITIVE_X:
            if not interlacing_holds(x, max_order):
                failures.append(f"interlacing x={x}")
            target = eval_e_of_x(x, precision_bits)
            for n in range(1, max_order + 1):
                report = EnclosureService.enclose(x, n, precision_bits)
                if not report.numeric.strictly_contains(target):
                    failures.append(f"containment x={x} n={n}")
        for x in SANDWICH_NEGATIVE_X:
            if not increasing_holds(x, max_order):
                failures.append(f"increase x={x}")
            target = eval_e_of_x(x, precision_bits)
            for n in range(1, max_order + 1):
                report = EnclosureService.enclose(x, n, precision_bits)
                if not report.numeric_lo < target.lo:
                    failures.append(f"lower bound x={x} n={n}")
        return CheckResult(name="sandwich", passed=not failures, detail="; ".join(failures) or f"orders <= {max_order}")

    # ============ Keller Expansions ============
    @staticmethod
    def check_keller_rows() -> CheckResult:
        expected = {2: [1, 1], 3: [1, 3, 2], 4: [1, 4, 6, 3], 5: [1, 5, 10, 10, 4], 6: [1, 6, 15, 20, 15, 5]}
        bad = [k for k, row in expected.items() if KellerService.keller_row(k) != row]
        return CheckResult(name="keller_rows", passed=not bad, detail=f"bad rows {bad}" if bad else "k = 2..6")

    @staticmethod
    def check_expansion_soundness(
        K: int = 6,
        exponents: Sequence[int] = range(10, 21),
        random_count: int = 5,
        seed: int = 2017,
        precision_bits: int = DEFAULT_PRECISION_BITS,
    ) -> CheckResult:
        rng = random.Random(seed)
        series = [("e-series", KellerService.e_series(K + 6))]
        series += [(f"random#{i}", random_series(rng, K + 6)) for i in range(random_count)]
        failures = []
        for label, a in series:
            for c in SOUNDNESS_SHIFTS:
                # 一般情況為 K+1；b_{K+1}(c) = 0 時往後找第一個非零係數
                m = KellerService.remainder_order(a, c, K, search=5)
                if m is None:
                    failures.append(f"{label} c={c}: b_{K + 1}..b_{K + 5} all vanish")
                    continue
                ratios = KellerService.discrepancy_log2_ratios(a, c, K, list(exponents), precision_bits)
                off = [round(r, 3) for r in ratios if not m - 0.5 <= r <= m + 0.5]
                if off:
                    failures.append(f"{label} c={c} (expected {m}): {off}")
        return CheckResult(name="expansion_soundness", passed=not failures, detail="; ".join(failures) or f"K = {K}")

    @staticmethod
    def check_keller_limit(precision_bits: int = DEFAULT_PRECISION_BITS) -> CheckResult:
        e = enclose_constant_e(precision_bits)
        e_mid = mpf_to_fraction(e.mid())
        a = KellerService.e_series(3)
        y = Fraction(2) ** 20
        failures = []
        for c in LIMIT_SHIFTS:
            b2 = KellerService.expand_shifted(a, c, 2).b(2)
            bound = 10 * abs(b2) * mpf_to_fraction(e.hi) / y ** 2
            value = eval_keller_difference(y, c, precision_bits)
            if not abs(mpf_to_fraction(value.mid()) - e_mid) <= bound:
                failures.append(f"limit c={c}")
            rows = convergence_probe(c, [Fraction(2) ** j for j in range(10, 17)], precision_bits)
            slopes = [float(r.slope) for r in rows if r.slope is not None]
            if not all(-2.2 <= s <= -1.8 for s in slopes):
                failures.append(f"slopes c={c}: {[round(s, 3) for s in slopes]}")
        return CheckResult(name="keller_limit", passed=not failures, detail="; ".join(failures) or "y = 2^20")

    @staticmethod
    def check_shift_reduction(count: int = 20, seed: int = 1998) -> CheckResult:
        rng = random.Random(seed)
        bad = []
        for i in range(count):
            K = rng.randint(2, 8)
            a = random_series(rng, rng.randint(K, 10))
            plain = KellerService.expand_plain(a, K)
            shifted = KellerService.expand_shifted(a, 0, K)
            if plain.bks != shifted.bks or plain.a0 != shifted.a0:
                bad.append(i)
        return CheckResult(name="shift_reduction", passed=not bad, detail=f"bad cases {bad}" if bad else f"{count} series")

    # ============ Runner ============
    @staticmethod
    def run_all(max_n: int = 30, precision_bits: int = DEFAULT_PRECISION_BITS) -> List[CheckResult]:
        checks: List[Tuple[str, Callable[[], CheckResult]]] = [
            ("coefficient_table", VerifyService.check_coefficient_table),
            ("oracle_equivalence", lambda: VerifyService.check_oracle_equivalence(max_n)),
            ("lemma_one", lambda: VerifyService.check_lemma_one(max_n)),
            ("series_representation", lambda: VerifyService.check_series_representation(precision_bits=precision_bits)),
            ("sandwich", VerifyService.check_sandwich),
            ("keller_rows", VerifyService.check_keller_rows),
            ("expansion_soundness", lambda: VerifyService.check_expansion_soundness(precision_bits=precision_bits)),
            ("keller_limit", lambda: VerifyService.check_keller_limit(precision_bits)),
            ("shift_reduction", VerifyService.check_shift_reduction),
        ]
        results = []
        for name, check in checks:
            try:
                result = check()
            except ExSeriesError as e:
                result = CheckResult(name=name, passed=False, detail=str(e))
            if result.passed:
                logger.info(f"[VerifyService] {result.name} passed: {result.detail}")
            else:
                logger.warning(f"[VerifyService] {result.name} FAILED: {result.detail}")
            results.append(result)
        return results
