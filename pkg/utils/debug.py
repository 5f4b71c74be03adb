"""デバッグログ出力

標準出力は決定的な結果出力専用なので、ログはすべて標準エラーに出す。
"""
import os
import sys

_enabled = os.environ.get("BRUMER_DEBUG", "") not in ("", "0")


def set_debug(enabled: bool) -> None:
    """デバッグ出力の有効/無効を切り替える"""
    global _enabled
    _enabled = bool(enabled) or os.environ.get("BRUMER_DEBUG", "") not in ("", "0")


def is_debug() -> bool:
    return _enabled


def debug_log(message: str) -> None:
    """[DEBUG] 付きで1行出力"""
    if _enabled:
        print(f"[DEBUG] {message}", file=sys.stderr)


def debug_banner(title: str) -> None:
    """処理の区切りを出力"""
    if _enabled:
        print("=" * 80, file=sys.stderr)
        print(f"[DEBUG] ========== {title} ==========", file=sys.stderr)
