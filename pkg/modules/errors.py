"""Exception hierarchy shared by the library and the CLI."""


class ExSeriesError(Exception):
    """所有錯誤的基底類別。"""


class DomainError(ExSeriesError, ValueError):
    """輸入超出定義域（x、y、c、階數、級數種類等）。"""


class RationalFormatError(DomainError):
    """字串不符合有理數文字格式。"""


class TruncationError(ExSeriesError, ArithmeticError):
    """無窮級數在項數上限內未收斂。"""


class VerificationError(ExSeriesError, AssertionError):
    """機器檢查的性質不成立。"""
