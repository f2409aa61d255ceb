"""exseries 命令列主程式。"""
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv
load_dotenv()  # 讀取 .env 檔

import click

from controls.cli_api import COMMANDS
from modules.config import LOG_LEVEL

logger = logging.getLogger(__name__)


@click.group(name="exseries", help="Exact coefficients, sandwich bounds and Keller-type expansions of (1+x)^(1/x).")
@click.version_option("1.0.0", prog_name="exseries")
def cli() -> None:
    pass


# 注冊命令
for command in COMMANDS:
    cli.add_command(command)


def run(argv: Optional[List[str]] = None) -> int:
    """
    執行一次命令並回傳 exit code。

    0 成功；2 用法錯誤（參數格式、超過上限、未知子命令）；1 定義域或計算錯誤。
    錯誤訊息一律寫到 stderr，stdout 只放請求的輸出。
    """
    # 日誌只寫 stderr
    logging.basicConfig(stream=sys.stderr, level=LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    args = list(sys.argv[1:] if argv is None else argv)
    logger.debug(f"[Main] argv = {args}")
    try:
        rv = cli.main(args=args, prog_name="exseries", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(run())
