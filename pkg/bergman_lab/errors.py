"""例外定義

各例外は CLI の終了コードを exit_code として持つ。
  2: 設定・入力エラー（範囲外パラメータ、構文エラー、解像度不足）
  3: 数値エラー（非有限の被積分関数、SVD 非収束、カーネル打ち切り不足）
"""

from typing import Optional


class LabError(Exception):
    """bergman-lab の全例外の基底クラス"""

    exit_code: int = 3


class ConfigError(LabError):
    """設定値・フラグ・入力の不正"""

    exit_code = 2


class ExpressionSyntaxError(ConfigError):
    """シンボル式の構文エラー（position は 0 始まりの文字位置）"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DomainError(ConfigError, ValueError):
    """単位円板外の点、許容範囲外のパラメータ"""


class InsufficientResolutionError(ConfigError):
    """求積則が要求された次数を解像できない"""


class NumericalError(LabError):
    """数値計算の失敗"""

    exit_code = 3


class NonFiniteIntegrandError(NumericalError):
    """被積分関数がノードで非有限"""

    def __init__(self, index: int, point: complex, value: complex):
        super().__init__(
            f"integrand not finite at node {index} (w={point:.17g}): {value}"
        )
        self.index = index
        self.point = point


class ExpressionEvaluationError(NumericalError):
    """シンボル式の評価エラー（負の実数の log、ゼロ除算など）"""

    def __init__(self, message: str, subexpression: str, index: Optional[int] = None, point: Optional[complex] = None):
        where = "" if index is None else f" at node {index} (w={point:.17g})"
        super().__init__(f"{message} in '{subexpression}'{where}")
        self.subexpression = subexpression
        self.index = index


class SpectralConvergenceError(NumericalError):
    """特異値分解が収束しなかった"""


class KernelTruncationError(NumericalError):
    """行列次数 N → N+16 で Schur 積分が 1% 超変化した"""


class NonIntegrableSymbolError(NumericalError):
    """L¹ に属さないシンボル"""
