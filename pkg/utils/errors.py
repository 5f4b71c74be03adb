"""例外クラス定義

CLI の終了コードとの対応:
    InputError            -> 3
    PrecisionTooLow (上限到達) -> 2（判定不能）
"""
from typing import Optional


class AlgebraError(Exception):
    """本パッケージの全例外の基底クラス"""


class InputError(AlgebraError):
    """入力データの誤り（JSON ポインタ形式の位置情報付き）"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path or ""
        super().__init__(f"{self.path}: {message}" if self.path else message)


class OrderBoundExceeded(AlgebraError):
    """群の位数が設定上限を超えた"""


class NotASubgroup(AlgebraError):
    """部分群ではない"""


class NotNormalSubgroup(AlgebraError):
    """正規部分群ではない"""


class CoefficientFieldTooSmall(AlgebraError):
    """係数体の導手が足りない（自動拡大はしない）"""


class NotIrreducible(AlgebraError):
    """既約指標であるべき入力が既約でない"""


class EvenCharacterError(AlgebraError):
    """偶指標は受け付けない"""


class InconsistentPlaceData(AlgebraError):
    """素点データ（フロベニウス・惰性群）の不整合"""


class MissingLValue(AlgebraError):
    """L 値の計算経路も証明書も存在しない"""


class PresentationError(AlgebraError):
    """表示行列・写像の不備（全射でない、被約ノルムが可逆でない 等）"""


class PrecisionTooLow(AlgebraError):
    """p 進精度 p^k では判定できない"""

    def __init__(self, message: str, precision: int):
        self.precision = precision
        super().__init__(message)


class IdentityUnproven(AlgebraError):
    """p 進 L 値と複素 L 値の一致が示されていない"""


class NotCheckable(AlgebraError):
    """検証に必要なデータが足りない"""


class CorpusEntryNotFound(InputError):
    """コーパスにもファイルシステムにも見つからない"""
