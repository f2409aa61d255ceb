"""click commands exposing the coefficient, enclosure and Keller services."""
import json
import logging
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Literal, Optional

import click
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from controls.coeffs_service import CoeffService
from controls.enclosure_service import EnclosureService
from controls.keller_service import KellerService
from controls.tools import RATIONAL, render_json, render_table, require_cap, rows_to_csv
from controls.verify_service import VerifyService
from modules.config import DEFAULT_PRECISION_BITS, MAX_KELLER_ORDER, MAX_ORDER, MAX_PRECISION_BITS
from modules.errors import ExSeriesError, RationalFormatError
from modules.exactnum import format_rational, parse_rational
from modules.highprec import (
    convergence_probe, enclose_constant_e, eval_keller_difference, probe_to_csv, rational_interval,
)
from modules.models import DECIMAL_DIGITS, SeriesPoly, decimal_str, mpf_to_fraction, records_to_rows

logger = logging.getLogger(__name__)


# Pydantic Models
# 每次呼叫在計算前先整體驗證
class CliConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subcommand: Literal["coeffs", "enclose", "keller", "limit", "verify", "export"]
    n: Optional[int] = Field(default=None, ge=0, description="係數索引上限")
    order: Optional[int] = Field(default=None, ge=1, description="部分和階數或展開階數 K")
    x: Optional[Fraction] = None
    c: Optional[Fraction] = None
    y: Optional[Fraction] = None
    digits: int = Field(default=DECIMAL_DIGITS, ge=1, le=1000, description="十進位輸出位數")
    precision_bits: int = Field(default=DEFAULT_PRECISION_BITS, ge=16, description="工作精度（bits）")
    format: Literal["json", "csv", "bfile"] = "json"


def _config(**fields: Any) -> CliConfig:
    try:
        config = CliConfig(**fields)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "arguments"
        raise click.UsageError(f"invalid {where}: {first.get('msg')}")
    require_cap(config.precision_bits, MAX_PRECISION_BITS, "precision")
    if config.subcommand == "keller":
        require_cap(config.order, MAX_KELLER_ORDER, "order")
    else:
        require_cap(config.order, MAX_ORDER, "order")
    require_cap(config.n, MAX_ORDER, "n")
    logger.debug(f"[CLI] {config.subcommand} config: {config.model_dump()}")
    return config


@contextmanager
def _computation_errors() -> Iterator[None]:
    """定義域或計算錯誤 → exit 1。"""
    try:
        yield
    except (ExSeriesError, ValidationError) as e:
        logger.info(f"[CLI] computation failed: {e}")
        raise click.ClickException(str(e))


def _parse_series(text: str, scaled_by_e: bool, radius: Optional[Fraction]) -> SeriesPoly:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"series is not valid JSON: {e.msg}", param_hint="--series")
    if not isinstance(raw, list) or not raw:
        raise click.BadParameter("series must be a nonempty JSON array", param_hint="--series")
    try:
        coeffs = [parse_rational(str(v)) for v in raw]
    except RationalFormatError as e:
        raise click.BadParameter(str(e), param_hint="--series")
    with _computation_errors():
        return SeriesPoly.from_coeffs(coeffs, radius_hint=radius, scaled_by_e=scaled_by_e)


def _interval_dict(interval, digits: int) -> Dict[str, Any]:
    return {
        "lo": decimal_str(interval.lo, digits),
        "hi": decimal_str(interval.hi, digits),
        "precision_bits": interval.precision_bits,
    }


# Commands

# e_0..e_n 精確係數
@click.command("coeffs")
@click.option("--n", "n", type=int, required=True, help="last index")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "bfile"]), default="json", show_default=True)
@click.option("--which", type=click.Choice(["numerators", "denominators"]), default="numerators", show_default=True)
@click.option("--pretty", is_flag=True, help="human-readable table")
def coeffs_command(n: int, fmt: str, which: str, pretty: bool) -> None:
    """
    Exact Maclaurin coefficients e_0..e_n of (1+x)^(1/x)/e.

    json: array of rational strings; csv: n,e_n,f_n; bfile: same bytes as `export`.
    """
    config = _config(subcommand="coeffs", n=n, format=fmt)
    with _computation_errors():
        if config.format == "bfile":
            output = CoeffService.export_bfile(config.n, which).rstrip("\n")
        else:
            rows = records_to_rows(CoeffService.coeff_records(config.n))
            if pretty:
                output = render_table(rows, ["n", "e_n", "f_n"])
            elif config.format == "csv":
                output = rows_to_csv(rows, ["n", "e_n", "f_n"]).rstrip("\n")
            else:
                output = render_json([row["e_n"] for row in rows])
    click.echo(output)


# 夾擠界 e_n(x)
@click.command("enclose")
@click.option("--x", "x", type=RATIONAL, required=True)
@click.option("--order", type=int, required=True)
@click.option("--precision", "precision_bits", type=int, default=DEFAULT_PRECISION_BITS, show_default=True)
@click.option("--pretty", is_flag=True, help="human-readable table")
def enclose_command(x: Fraction, order: int, precision_bits: int, pretty: bool) -> None:
    """Exact e-multiple bounds for (1+x)^(1/x) with an outward-rounded numeric interval."""
    config = _config(subcommand="enclose", x=x, order=order, precision_bits=precision_bits)
    with _computation_errors():
        payload = EnclosureService.enclose(config.x, config.order, config.precision_bits).to_dict()
    if pretty:
        click.echo(render_table([{"field": k, "value": v} for k, v in payload.items()], ["field", "value"]))
    else:
        click.echo(render_json(payload))


# Keller 型展開
@click.command("keller")
@click.option("--order", "K", type=int, required=True, help="expansion order K >= 2")
@click.option("--c", "c", type=RATIONAL, default="0", show_default=True, help="shift")
@click.option("--series", "series_text", type=str, default=None, help="JSON array a_0..a_N (default: e-series)")
@click.option("--scaled-by-e/--rational", "scaled_by_e", default=False, help="custom series carries a factor e")
@click.option("--radius", type=RATIONAL, default=None, help="radius of convergence of the custom series")
@click.option("--y", "y", type=RATIONAL, default=None, help="also evaluate the expansion at y")
@click.option("--precision", "precision_bits", type=int, default=DEFAULT_PRECISION_BITS, show_default=True)
@click.option("--digits", type=int, default=DECIMAL_DIGITS, show_default=True)
def keller_command(
    K: int, c: Fraction, series_text: Optional[str], scaled_by_e: bool,
    radius: Optional[Fraction], y: Optional[Fraction], precision_bits: int, digits: int,
) -> None:
    """Coefficients b_2..b_K of (y+1)G(y+c) - yG(y+c-1) = a_0 + Σ b_k/(y+c)^k."""
    config = _config(subcommand="keller", order=K, c=c, y=y, digits=digits, precision_bits=precision_bits)
    if config.order < 2:
        raise click.BadParameter("K must be >= 2", param_hint="--order")
    if series_text is None:
        with _computation_errors():
            a = KellerService.e_series(config.order)
    else:
        a = _parse_series(series_text, scaled_by_e, radius)

    with _computation_errors():
        expansion = KellerService.expand_shifted(a, config.c, config.order)
        payload = expansion.to_dict()
        if config.y is not None:
            value = KellerService.expansion_eval(expansion, config.y, config.precision_bits)
            payload["y"] = format_rational(config.y)
            payload["value"] = _interval_dict(value, config.digits)
    click.echo(render_json(payload))


# Keller 極限與收斂探測
@click.command("limit")
@click.option("--c", "c", type=RATIONAL, default="0", show_default=True, help="shift")
@click.option("--y", "y", type=RATIONAL, default=None)
@click.option("--precision", "precision_bits", type=int, default=DEFAULT_PRECISION_BITS, show_default=True)
@click.option("--probe-from", type=int, default=None, help="first exponent j of y = 2^j")
@click.option("--probe-to", type=int, default=None, help="last exponent j of y = 2^j")
@click.option("--digits", type=int, default=DECIMAL_DIGITS, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def limit_command(
    c: Fraction, y: Optional[Fraction], precision_bits: int,
    probe_from: Optional[int], probe_to: Optional[int], digits: int, fmt: str,
) -> None:
    """
    (y+1)(1+1/(y+c))^(y+c) - y(1+1/(y+c-1))^(y+c-1) against e.

    With --y: one value. With --probe-from/--probe-to: error and log-log slope per y = 2^j.
    """
    config = _config(subcommand="limit", c=c, y=y, digits=digits, precision_bits=precision_bits, format=fmt)
    probing = probe_from is not None or probe_to is not None
    if probing == (config.y is not None):
        raise click.UsageError("give either --y or both --probe-from and --probe-to")

    if probing:
        if probe_from is None or probe_to is None or not 0 <= probe_from < probe_to:
            raise click.UsageError("--probe-from and --probe-to must satisfy 0 <= from < to")
        require_cap(probe_to, MAX_ORDER, "probe-to")
        ys = [Fraction(2) ** j for j in range(probe_from, probe_to + 1)]
        with _computation_errors():
            rows = convergence_probe(config.c, ys, config.precision_bits)
        if config.format == "csv":
            click.echo(probe_to_csv(rows).rstrip("\n"))
            return
        payload: Any = {
            "c": format_rational(config.c),
            "precision_bits": config.precision_bits,
            "rows": [
                {
                    "y": format_rational(r.y),
                    "abs_error": decimal_str(r.abs_error, config.digits),
                    "slope": decimal_str(r.slope, config.digits),
                }
                for r in rows
            ],
        }
        click.echo(render_json(payload))
        return

    with _computation_errors():
        value = eval_keller_difference(config.y, config.c, config.precision_bits)
        e = enclose_constant_e(config.precision_bits)
        payload = {
            "c": format_rational(config.c),
            "y": format_rational(config.y),
            "value": _interval_dict(value, config.digits),
            "e": _interval_dict(e, config.digits),
            "abs_error": decimal_str(
                rational_interval(abs(mpf_to_fraction(value.mid()) - mpf_to_fraction(e.mid())), config.precision_bits).mid(),
                config.digits,
            ),
            "precision_bits": config.precision_bits,
        }
    if config.format == "csv":
        click.echo(rows_to_csv([{"y": payload["y"], "value": decimal_str(value.mid(), config.digits),
                                 "abs_error": payload["abs_error"]}], ["y", "value", "abs_error"]).rstrip("\n"))
    else:
        click.echo(render_json(payload))


# 全部驗證項目
@click.command("verify")
@click.option("--max-n", type=int, default=30, show_default=True)
@click.option("--precision", "precision_bits", type=int, default=DEFAULT_PRECISION_BITS, show_default=True)
@click.pass_context
def verify_command(ctx: click.Context, max_n: int, precision_bits: int) -> None:
    """Run every machine check; exit 1 when any fails."""
    config = _config(subcommand="verify", n=max_n, precision_bits=precision_bits)
    if config.n < 1:
        raise click.BadParameter("max-n must be >= 1", param_hint="--max-n")
    results: List = VerifyService.run_all(config.n, config.precision_bits)
    click.echo(render_json([r.to_dict() for r in results], pretty=True))
    if not all(r.passed for r in results):
        ctx.exit(1)


# OEIS b-file
@click.command("export")
@click.option("--n", "n", type=int, required=True)
@click.option("--which", type=click.Choice(["numerators", "denominators"]), default="numerators", show_default=True)
def export_command(n: int, which: str) -> None:
    """|numerator(e_n)| or denominator(e_n) for n = 0..N as `index value` lines."""
    config = _config(subcommand="export", n=n, format="bfile")
    with _computation_errors():
        text = CoeffService.export_bfile(config.n, which)
    click.echo(text, nl=False)


COMMANDS = [coeffs_command, enclose_command, keller_command, limit_command, verify_command, export_command]
