"""Pydantic モデル定義（重み仕様・埋め込みクエリ・診断レポート・実行設定）"""

from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from bergman_lab.constants import (
    GRID_RADIUS_CAP,
    Command,
    OutputFormat,
    ReportKind,
    WeightConvention,
)


class SchurWeightSpec(BaseModel):
    """Schur テストの重み g（K_v(v))^ε の指数 ε と指数の取り方"""
    epsilon: float = 0.125
    convention: WeightConvention = "weight-squared"

    model_config = {"frozen": True}

    @field_validator("epsilon")
    @classmethod
    def _epsilon_range(cls, v: float) -> float:
        if not 0.0 < v < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        return v

    def measure_exponent(self) -> float:
        """被積分関数に掛かる (1-|v|²) の指数

        weight-squared（T_f 全体）は g² = K^ε、weight-plain（T_f - T_f^[r]）は g = K^ε を
        積分に掛けるので、どちらも (1-|v|²)^(-2ε) になる。
        """
        return -2.0 * self.epsilon


class EmbeddingQuery(BaseModel):
    """Luecking の埋め込み L^p_a ⊂ L^q(μ) の問い合わせ"""
    p: float
    q: float
    delta: float = 0.25

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check(self) -> "EmbeddingQuery":
        if not 0.0 < self.q < self.p:
            raise ValueError("embedding query needs 0 < q < p")
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        return self

    @property
    def s(self) -> float:
        """1/s + q/p = 1 を満たす指数"""
        return 1.0 / (1.0 - self.q / self.p)


class DiagnosticsReport(BaseModel):
    """診断・恒等式検証のレポート（JSON/CSV に直列化される）"""
    kind: ReportKind
    symbol: Optional[str] = None
    parameters: dict[str, Any] = {}
    grid: dict[str, Any] = {}
    values: list[dict[str, Any]] = []
    summary: dict[str, Any] = {}
    tolerances: dict[str, float] = {}
    versions: dict[str, str] = {}


class RunConfig(BaseModel):
    """1 回の CLI 実行の設定（フラグ > 設定ファイル > 環境変数 > 既定値 で合成済み）"""
    command: Command
    symbol: Optional[str] = None
    n: int = Field(64, ge=1, le=4096)
    radii: list[float]
    angles: int = Field(16, ge=1)
    epsilon: float = 0.125
    p: float = 2.0
    q: float = 1.0
    delta: float = 0.25
    r_schedule: list[float]
    quad_radial: int = Field(64, ge=1)
    quad_angular: int = Field(256, ge=1)
    graded_panels: int = Field(24, ge=0)
    output: Optional[str] = None
    format: OutputFormat = "json"
    threads: Optional[int] = Field(None, ge=1)
    seed: int = 20240101
    suite: str = "all"
    atoms: Optional[str] = None

    @field_validator("radii")
    @classmethod
    def _radii_range(cls, v: list[float]) -> list[float]:
        if any(not 0.0 <= r <= GRID_RADIUS_CAP for r in v):
            raise ValueError(f"grid radii must lie in [0, {GRID_RADIUS_CAP}]")
        return sorted(v)

    @field_validator("r_schedule")
    @classmethod
    def _schedule_range(cls, v: list[float]) -> list[float]:
        if any(not 0.0 < r < 1.0 for r in v):
            raise ValueError("truncation radii must lie in (0, 1)")
        return sorted(v)

    @field_validator("epsilon", "delta")
    @classmethod
    def _half_open(cls, v: float) -> float:
        if not 0.0 < v < 0.5:
            raise ValueError("must lie in (0, 1/2)")
        return v

    @model_validator(mode="after")
    def _command_fields(self) -> "RunConfig":
        needs_symbol = self.command in ("berezin", "matrix", "bound-check", "compact-check", "schur")
        if needs_symbol and not self.symbol:
            raise ValueError(f"command '{self.command}' requires --symbol")
        if self.command == "luecking":
            if bool(self.symbol) == bool(self.atoms):
                raise ValueError("luecking requires exactly one of --symbol (density) or --atoms")
            if not 0.0 < self.q < self.p:
                raise ValueError("luecking requires 0 < q < p")
        if self.command == "bound-check" and not 1.0 <= self.q <= 2.0:
            raise ValueError("bound-check requires q in [1, 2]")
        if self.command == "schur" and self.p <= 1.0:
            raise ValueError("schur requires p > 1")
        return self
