"""Domain models (pydantic) shared by all services."""
import json
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import mpmath
from mpmath.libmp import mpf_add, mpf_shift, mpf_sub, to_rational
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from modules.errors import DomainError
from modules.exactnum import format_rational, require_rational

# 數值輸出一律 20 位有效數字
DECIMAL_DIGITS = 20


def decimal_str(value: Optional[mpmath.mpf], digits: int = DECIMAL_DIGITS) -> Optional[str]:
    if value is None:
        return None
    return mpmath.nstr(value, digits)


def mpf_to_fraction(value: mpmath.mpf) -> Fraction:
    """有限 mpf 的精確有理值。"""
    if not mpmath.isfinite(value):
        raise DomainError(f"non-finite value {value}")
    # man_exp 的尾數不帶正負號，改用 _mpf_ 的有號有理值
    return Fraction(*to_rational(value._mpf_))


class EMultiple(BaseModel):
    """以 m·e 表示的精確值；e > 0，比較大小等同比較 m。"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    multiplier: Fraction

    @field_validator("multiplier", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Fraction:
        return require_rational(value, "multiplier")

    def __lt__(self, other: "EMultiple") -> bool:
        return self.multiplier < other.multiplier

    def __le__(self, other: "EMultiple") -> bool:
        return self.multiplier <= other.multiplier

    def __gt__(self, other: "EMultiple") -> bool:
        return self.multiplier > other.multiplier

    def __ge__(self, other: "EMultiple") -> bool:
        return self.multiplier >= other.multiplier

    def __str__(self) -> str:
        return f"{format_rational(self.multiplier)}·e"


Scalar = Union[Fraction, EMultiple]


class FloatInterval(BaseModel):
    """外捨入區間 [lo, hi]。"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: mpmath.mpf
    hi: mpmath.mpf
    precision_bits: int

    @model_validator(mode="after")
    def _ordered(self) -> "FloatInterval":
        if not self.lo <= self.hi:
            raise DomainError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")
        return self

    def mid(self) -> mpmath.mpf:
        # 精確運算（prec=0），不受全域精度影響
        return mpmath.mp.make_mpf(mpf_shift(mpf_add(self.lo._mpf_, self.hi._mpf_, 0), -1))

    def width(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(mpf_sub(self.hi._mpf_, self.lo._mpf_, 0))

    def contains(self, value: Union[Fraction, int, mpmath.mpf, "FloatInterval"]) -> bool:
        if isinstance(value, FloatInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, mpmath.mpf):
            return self.lo <= value <= self.hi
        exact = require_rational(value)
        return mpf_to_fraction(self.lo) <= exact <= mpf_to_fraction(self.hi)

    def strictly_contains(self, other: "FloatInterval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": decimal_str(self.lo),
            "hi": decimal_str(self.hi),
            "precision_bits": self.precision_bits,
        }


class SeriesPoly(BaseModel):
    """截斷冪級數 c_0 + c_1 x + ... + c_N x^N。

    scaled_by_e 為 True 時代表 e·Σ c_k x^k（EMultiple 係數）。
    radius_hint 只是收斂半徑的註記，不做任何檢查。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: Tuple[Fraction, ...]
    order: int
    radius_hint: Optional[Fraction] = None
    scaled_by_e: bool = False

    @field_validator("coeffs", mode="before")
    @classmethod
    def _coerce_coeffs(cls, value: Any) -> Tuple[Fraction, ...]:
        return tuple(require_rational(c, "coefficient") for c in value)

    @field_validator("radius_hint", mode="before")
    @classmethod
    def _coerce_radius(cls, value: Any) -> Optional[Fraction]:
        return None if value is None else require_rational(value, "radius_hint")

    @model_validator(mode="after")
    def _shape(self) -> "SeriesPoly":
        if self.order < 0:
            raise DomainError(f"truncation order must be nonnegative, got {self.order}")
        if len(self.coeffs) != self.order + 1:
            raise DomainError(
                f"series of order {self.order} needs {self.order + 1} coefficients, got {len(self.coeffs)}"
            )
        if self.radius_hint is not None and self.radius_hint <= 0:
            raise DomainError("radius_hint must be positive")
        return self

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Any], **kwargs: Any) -> "SeriesPoly":
        coeffs = list(coeffs)
        if not coeffs:
            raise DomainError("series needs at least one coefficient")
        return cls(coeffs=coeffs, order=len(coeffs) - 1, **kwargs)

    @classmethod
    def from_scalars(cls, values: Sequence[Any], radius_hint: Any = None) -> "SeriesPoly":
        """接受全為有理數或全為 EMultiple 的係數；混用即拒絕。"""
        values = list(values)
        if not values:
            raise DomainError("series needs at least one coefficient")
        kinds = {isinstance(v, EMultiple) for v in values}
        if len(kinds) > 1:
            raise DomainError("mixed scalar kinds in one series")
        if True in kinds:
            return cls.from_coeffs([v.multiplier for v in values], radius_hint=radius_hint, scaled_by_e=True)
        return cls.from_coeffs(values, radius_hint=radius_hint)

    def coefficient(self, k: int) -> Fraction:
        if k < 0 or k > self.order:
            raise DomainError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def scalar(self, k: int) -> Scalar:
        c = self.coefficient(k)
        return EMultiple(multiplier=c) if self.scaled_by_e else c

    def truncate(self, order: int) -> "SeriesPoly":
        if order > self.order:
            raise DomainError(f"cannot extend series of order {self.order} to {order}")
        return self.model_copy(update={"coeffs": self.coeffs[: order + 1], "order": order})

    def to_json(self) -> str:
        return json.dumps([format_rational(c) for c in self.coeffs])


class CoeffRecord(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    e_n: Fraction
    f_n: Fraction

    @model_validator(mode="after")
    def _signs(self) -> "CoeffRecord":
        if self.f_n != (-1) ** self.n * self.e_n:
            raise DomainError(f"f_{self.n} must equal (-1)^n e_{self.n}")
        return self


class BoundReport(BaseModel):
    """e_n(x) 夾擠界的報告；lower/upper 以 EMultiple 精確表示。"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: Fraction
    order: int
    lower: Optional[EMultiple]
    upper: Optional[EMultiple]
    sided: Literal["two", "lower"]
    numeric_lo: Optional[mpmath.mpf]
    numeric_hi: Optional[mpmath.mpf]
    precision_bits: int
    estimate: Optional[mpmath.mpf] = None

    @model_validator(mode="after")
    def _consistent(self) -> "BoundReport":
        if self.sided == "two":
            if self.lower is None or self.upper is None:
                raise DomainError("two-sided report needs both bounds")
            if self.x != 0 and not self.lower < self.upper:
                raise DomainError("lower bound must lie below upper bound")
        elif self.upper is not None or self.numeric_hi is not None:
            raise DomainError("lower-only report cannot carry an upper bound")
        return self

    @property
    def numeric(self) -> Optional[FloatInterval]:
        if self.numeric_lo is None or self.numeric_hi is None:
            return None
        return FloatInterval(lo=self.numeric_lo, hi=self.numeric_hi, precision_bits=self.precision_bits)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": format_rational(self.x),
            "n": self.order,
            "lower_mul": format_rational(self.lower.multiplier) if self.lower else None,
            "upper_mul": format_rational(self.upper.multiplier) if self.upper else None,
            "sided": self.sided,
            "numeric_lo": decimal_str(self.numeric_lo),
            "numeric_hi": decimal_str(self.numeric_hi),
            "precision_bits": self.precision_bits,
            "estimate": decimal_str(self.estimate),
        }


class KellerExpansion(BaseModel):
    """a_0 + Σ_{k=2}^{K} b_k / (y + c)^k，b_k 已帶正負號。"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a0: Fraction
    bks: Tuple[Fraction, ...]
    shift: Fraction = Fraction(0)
    K: int
    validity_lower_y: Optional[Fraction] = None
    scaled_by_e: bool = False

    @model_validator(mode="after")
    def _shape(self) -> "KellerExpansion":
        if self.K < 2:
            raise DomainError(f"expansion order K must be >= 2, got {self.K}")
        if len(self.bks) != self.K - 1:
            raise DomainError(f"expected {self.K - 1} coefficients b_2..b_K, got {len(self.bks)}")
        return self

    def b(self, k: int) -> Fraction:
        if k < 2 or k > self.K:
            raise DomainError(f"b_{k} outside 2..{self.K}")
        return self.bks[k - 2]

    def a0_scalar(self) -> Scalar:
        return EMultiple(multiplier=self.a0) if self.scaled_by_e else self.a0

    def b_scalar(self, k: int) -> Scalar:
        b = self.b(k)
        return EMultiple(multiplier=b) if self.scaled_by_e else b

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a0": format_rational(self.a0),
            "shift": format_rational(self.shift),
            "K": self.K,
            "b": [format_rational(b) for b in self.bks],
            "scaled_by_e": self.scaled_by_e,
            "validity_lower_y": (
                format_rational(self.validity_lower_y) if self.validity_lower_y is not None else None
            ),
        }


class ProbeRow(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: Fraction
    abs_error: mpmath.mpf
    slope: Optional[mpmath.mpf] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def records_to_rows(records: List[CoeffRecord]) -> List[Dict[str, str]]:
    return [
        {"n": str(r.n), "e_n": format_rational(r.e_n), "f_n": format_rational(r.f_n)}
        for r in records
    ]
