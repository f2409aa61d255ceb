"""Output and usage-guard tools for the command-line layer."""
import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence

import click

from modules.errors import RationalFormatError
from modules.exactnum import parse_rational


class RationalParamType(click.ParamType):
    """click 參數型別：精確有理數文字，如 "-7/16"。"""
    name = "rational"

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return parse_rational(value)
        except RationalFormatError as e:
            self.fail(str(e), param, ctx)


RATIONAL = RationalParamType()


def require_cap(value: Optional[int], cap: int, option: str) -> None:
    """
    檢查參數是否超過設定上限。

    Raises:
        click.UsageError: 超過上限（exit 2，訊息包含上限值）
    """
    if value is not None and value > cap:
        raise click.UsageError(f"{option} = {value} exceeds the configured cap {cap}")


def render_json(payload: Any, pretty: bool = False) -> str:
    # 固定鍵序，相同輸入輸出相同位元組
    if pretty:
        return json.dumps(payload, indent=2, ensure_ascii=False)
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def rows_to_csv(rows: Sequence[Dict[str, str]], header: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(header), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def render_table(rows: Sequence[Dict[str, Any]], header: Sequence[str]) -> str:
    """人看的等寬表格（--pretty）。"""
    cells: List[List[str]] = [[str(h) for h in header]]
    cells += [["" if row.get(h) is None else str(row.get(h)) for h in header] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
    lines = ["  ".join(text.rjust(w) for text, w in zip(line, widths)) for line in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
