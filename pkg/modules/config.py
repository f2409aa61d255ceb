"""Runtime configuration read from the environment (.env supported)."""
import os

# 預設工作精度（bits）
DEFAULT_PRECISION_BITS = int(os.getenv("EXSERIES_PRECISION_BITS", "256"))

# CLI 可接受的上限，超過即視為用法錯誤
MAX_ORDER = int(os.getenv("EXSERIES_MAX_ORDER", "200"))
MAX_KELLER_ORDER = int(os.getenv("EXSERIES_MAX_KELLER_ORDER", "60"))
MAX_PRECISION_BITS = int(os.getenv("EXSERIES_MAX_PRECISION_BITS", "65536"))

# e_n 無窮級數的最大項數
SERIES_TERM_CAP = int(os.getenv("EXSERIES_SERIES_TERM_CAP", "10000"))

LOG_LEVEL = os.getenv("EXSERIES_LOG_LEVEL", "WARNING").upper()
