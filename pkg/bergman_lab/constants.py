"""共有定数"""

from typing import Final, Literal

# 単位円板の点として受け付ける |z| の上限（これ以上は境界扱いで拒否）
POINT_CAP: Final[float] = 1.0 - 1e-12
# 境界極限を探る格子の最大半径
GRID_RADIUS_CAP: Final[float] = 0.995

# CLI 終了コード
EXIT_OK: Final[int] = 0
EXIT_SUITE_FAILED: Final[int] = 1
EXIT_CONFIG_ERROR: Final[int] = 2
EXIT_NUMERICAL_ERROR: Final[int] = 3

Command = Literal["verify", "berezin", "matrix", "bound-check", "compact-check", "luecking", "schur"]
VALID_COMMANDS: Final[tuple[str, ...]] = (
    "verify", "berezin", "matrix", "bound-check", "compact-check", "luecking", "schur",
)

ReportKind = Literal[
    "identity-suite", "boundedness", "compactness", "berezin", "matrix", "embedding", "schur",
]
OutputFormat = Literal["json", "csv"]
WeightConvention = Literal["weight-squared", "weight-plain"]
MeasureKind = Literal["density", "atoms"]

VALID_SUITES: Final[tuple[str, ...]] = (
    "geometry", "quadrature", "toeplitz", "berezin", "lemma2", "lemma1", "remark1",
    "lemma3", "coefficient-extraction", "column-scaling", "theorem6", "luecking",
)

# 判定文字列（レポートの summary.verdict に入る）
VERDICT_BOUNDED: Final[str] = "boundedness supported: profile bounded on grid"
VERDICT_UNBOUNDED: Final[str] = "boundedness NOT supported: profile increasing"
VERDICT_COMPACT: Final[str] = "consistent with compactness"
VERDICT_NOT_COMPACT: Final[str] = "compactness NOT supported"
VERDICT_EMBEDDING_HOLDS: Final[str] = "embedding holds"
VERDICT_EMBEDDING_FAILS: Final[str] = "embedding fails"
VERDICT_INCONCLUSIVE: Final[str] = "inconclusive"

# 診断のしきい値
BOUNDARY_GROWTH_FACTOR: Final[float] = 1.1   # 最後の3半径で 10% 以上の増加 → 非有界の兆候
COMPACT_DECAY_FACTOR: Final[float] = 2.0     # 1ステップあたり 2 倍以上の減衰
EMBEDDING_STABLE_REL: Final[float] = 0.10    # 連続2回の細分化で 10% 以内
EMBEDDING_GROWTH_FACTOR: Final[float] = 2.0  # 細分化で 2 倍以上の増加
KERNEL_REFINE_EXTRA: Final[int] = 16         # Schur 積分の打ち切り確認で増やす次数
KERNEL_REFINE_REL: Final[float] = 0.01
SERIES_TAIL_TOL: Final[float] = 1e-10        # 係数抽出の級数打ち切り
ATOM_TIE_TOL: Final[float] = 1e-12
BEREZIN_GRADING_RADIUS: Final[float] = 0.95  # これを超える |z| は境界分割なしだと警告
SWEEP_ORDER_RADIUS: Final[float] = 0.95      # これを超える半径まで掃引するとき N の既定は sweep_order
