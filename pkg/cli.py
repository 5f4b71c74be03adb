"""コマンドラインの入口

    python cli.py chartable S4
    python cli.py classify S3 --p 3
    python cli.py stickelberger q_sqrt_m23 --p 3
    python cli.py check q_sqrt_m23 --mode brumer --p 3
    python cli.py corpus list

終了コード: 0 成立, 1 不成立, 2 判定不能（検証不能を含む）, 3 入力エラー
"""
import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from engine.core import CHECK_MODES, BrumerStarkEngine
from engine.reports import render_text
from utils.debug import debug_log
from utils.errors import AlgebraError, InputError, PrecisionTooLow
from utils.io import dump_json, load_assumptions, read_json

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_INPUT_ERROR = 3

STATUS_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "undecided": EXIT_UNDECIDED, "not-checkable": EXIT_UNDECIDED}


def _common_options(default=None) -> argparse.ArgumentParser:
    # サブコマンド側は SUPPRESS にして、サブコマンドより前に書いた指定を上書きしない
    common = argparse.ArgumentParser(add_help=False, argument_default=default)
    common.add_argument("--precision", type=int, help="p 進精度 k（ℤ/p^k で計算）")
    common.add_argument("--unit-bound", type=int, dest="unit_bound", help="単元の語の長さの上限")
    common.add_argument("--jobs", type=int, help="並列度")
    common.add_argument("--format", choices=["json", "text"], help="出力形式")
    common.add_argument("--assume", help="仮定の記録（JSON ファイル）")
    common.add_argument("--corpus", dest="corpus_dir", help="コーパスのディレクトリ")
    common.add_argument("--verbose", action="store_true", default=default, help="[DEBUG] ログを標準エラーに出す")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brumer-stark", description="非可換 Brumer–Stark 予想の検証ツール",
                                     parents=[_common_options()])
    common = _common_options(argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chartable", parents=[common], help="指標表")
    p.add_argument("group", help="群ファイルまたはコーパス名")

    p = sub.add_parser("classify", parents=[common], help="適用できる結果の判定")
    p.add_argument("group", nargs="?", help="G⁺ の群ファイルまたはコーパス名")
    p.add_argument("--extension", help="拡大データ（G⁺ = G/⟨j⟩ と S の前提も調べる）")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", nargs="+", help="正規部分群 N の生成元（巡回記法）")
    p.add_argument("--base-field", default="Q", dest="base_field")

    p = sub.add_parser("stickelberger", parents=[common], help="Stickelberger 元と整性")
    p.add_argument("extension")
    p.add_argument("--p", type=int)

    p = sub.add_parser("check", parents=[common], help="予想の検証")
    p.add_argument("extension")
    p.add_argument("--mode", choices=CHECK_MODES, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--theta-scale", dest="theta_scale", default="1", help="θ に掛ける有理数（反例の構成用）")

    p = sub.add_parser("corpus", parents=[common], help="コーパスの一覧")
    p.add_argument("action", choices=["list"])

    p = sub.add_parser("batch", parents=[common], help="タスク一覧の一括実行")
    p.add_argument("tasks", help="タスクのリスト（JSON ファイル）")
    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    keys = ("precision", "unit_bound", "jobs", "format", "corpus_dir", "verbose")
    return {k: getattr(args, k, None) for k in keys}


def _exit_code(output: dict) -> int:
    command = output["command"]
    result = output["result"]
    if command == "check":
        return STATUS_EXIT[result["verdict"]["status"]]
    if command == "classify":
        return EXIT_PASS if result["verdict"]["tag"] != "none" else EXIT_FAIL
    if command == "batch":
        return EXIT_PASS if all(r["success"] for r in result["results"]) else EXIT_FAIL
    return EXIT_PASS


def run(args: argparse.Namespace, engine: BrumerStarkEngine) -> dict:
    assumptions = load_assumptions(args.assume)
    if args.command == "chartable":
        return engine.chartable(engine.group(args.group))
    if args.command == "classify":
        if args.extension:
            return engine.classify_extension(engine.extension(args.extension), args.p, args.N, assumptions)
        if not args.group:
            raise InputError("群ファイルか --extension を指定してください")
        return engine.classify(engine.group(args.group), args.p, args.N, assumptions, args.base_field)
    if args.command == "stickelberger":
        return engine.stickelberger(engine.extension(args.extension), args.p)
    if args.command == "check":
        try:
            scale = Fraction(args.theta_scale)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"--theta-scale が有理数ではありません: {args.theta_scale!r}")
        return engine.check(engine.extension(args.extension), args.mode, args.p, assumptions, scale)
    if args.command == "corpus":
        return engine.corpus_list()
    tasks, _ = read_json(args.tasks)
    if not isinstance(tasks, list):
        raise InputError("タスクファイルはリストです")
    return engine.run_batch(tasks)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        engine = BrumerStarkEngine(_config_from_args(args))
        output = run(args, engine)
    except PrecisionTooLow as exc:
        print(f"判定不能: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except AlgebraError as exc:
        print(f"入力エラー: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValueError as exc:
        # pydantic による RunConfig の検証
        print(f"入力エラー: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if engine.config.format == "text":
        sys.stdout.write(render_text(output))
    else:
        sys.stdout.write(dump_json(output) + "\n")
    code = _exit_code(output)
    debug_log(f"終了コード {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
