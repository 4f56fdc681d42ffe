"""コマンドライン入口

設定の優先順位: フラグ > --config ファイル > 環境変数 BERGMAN_LAB_* > 既定値
"""

import argparse
import logging
import sys
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from bergman_lab import __version__
from bergman_lab.commands import run_command
from bergman_lab.config import Settings, load_config_file, parse_float_list, settings
from bergman_lab.constants import EXIT_CONFIG_ERROR, SWEEP_ORDER_RADIUS, VALID_COMMANDS, VALID_SUITES
from bergman_lab.errors import ConfigError, LabError
from bergman_lab.models import RunConfig

logger = logging.getLogger(__name__)

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_SWEEP_COMMANDS = ("berezin", "bound-check", "compact-check")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergman-lab",
        description="ベルグマン空間上のテープリッツ作用素の数値実験",
    )
    parser.add_argument("command", choices=VALID_COMMANDS, help="実行するコマンド")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--symbol", help="組み込み名（disk:0.5 など）または式（\"abs(w)^2\" など）")
    parser.add_argument("--N", dest="n", type=int, help="行列の打ち切り次数")
    parser.add_argument("--radii", help="カンマ区切りの半径格子")
    parser.add_argument("--angles", type=int, help="半径あたりの角度数")
    parser.add_argument("--epsilon", type=float, help="Schur 重みの指数 ε ∈ (0, 1/2)")
    parser.add_argument("--p", type=float)
    parser.add_argument("--q", type=float)
    parser.add_argument("--delta", type=float, help="双曲円板の半径 δ ∈ (0, 1/2)")
    parser.add_argument("--r-schedule", dest="r_schedule", help="カンマ区切りの打ち切り半径")
    parser.add_argument("--quad-radial", dest="quad_radial", type=int)
    parser.add_argument("--quad-angular", dest="quad_angular", type=int)
    parser.add_argument("--graded-panels", dest="graded_panels", type=int)
    parser.add_argument("--output", help="出力先（省略時は標準出力）")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--threads", type=int, help="並列ワーカー数の上限")
    parser.add_argument("--seed", type=int, help="恒等式スイートの乱数シード")
    parser.add_argument("--config", help="KEY=value 形式の設定ファイル")
    parser.add_argument("--suite", help=f"verify のスイート（{', '.join(VALID_SUITES)}, all）")
    parser.add_argument("--atoms", help="点質量測度 \"re,im,mass;re,im,mass;...\"")
    parser.add_argument("--log-level", dest="log_level")
    return parser


def resolve_config(args: argparse.Namespace, env: Settings = settings) -> tuple[RunConfig, str]:
    """フラグ・設定ファイル・Settings を合成して RunConfig とログレベルを返す"""
    file_values = load_config_file(args.config) if args.config else {}

    def pick(name: str, default: Any) -> Any:
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name, default)

    def pick_list(name: str, default: str) -> list[float]:
        value = pick(name, default)
        return parse_float_list(value) if isinstance(value, str) else list(value)

    q_default = env.profile_q if args.command == "bound-check" else env.q
    radii = pick_list("radii", env.radii)
    # 境界近くまで掃引する診断の N の既定は sweep_order
    outward = args.command in _SWEEP_COMMANDS and max(radii, default=0.0) > SWEEP_ORDER_RADIUS
    n_default = env.sweep_order if outward else env.default_order
    config = RunConfig(
        command=args.command,
        symbol=pick("symbol", None),
        n=pick("n", n_default),
        radii=radii,
        angles=pick("angles", env.angles),
        epsilon=pick("epsilon", env.epsilon),
        p=pick("p", env.p),
        q=pick("q", q_default),
        delta=pick("delta", env.delta),
        r_schedule=pick_list("r_schedule", env.r_schedule),
        quad_radial=pick("quad_radial", env.quad_radial),
        quad_angular=pick("quad_angular", env.quad_angular),
        graded_panels=pick("graded_panels", env.graded_panels),
        output=pick("output", None),
        format=pick("format", "json"),
        threads=pick("threads", env.threads),
        seed=pick("seed", env.seed),
        suite=pick("suite", "all"),
        atoms=pick("atoms", None),
    )
    return config, str(pick("log_level", env.log_level)).upper()


def configure_logging(level: str) -> None:
    numeric = logging.getLevelName(level)
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level '{level}'")
    logging.basicConfig(level=numeric, format=_LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config, level = resolve_config(args)
        configure_logging(level)
    except LabError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        return run_command(config)
    except LabError as e:
        logger.error("%s failed: %s", config.command, e)
        return e.exit_code
    except ValidationError as e:
        logger.error("%s failed: %s", config.command, e)
        return EXIT_CONFIG_ERROR
