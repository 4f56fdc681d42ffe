"""アプリケーション設定"""

from pathlib import Path
from typing import Optional

from dotenv import dotenv_values
from pydantic import Field
from pydantic_settings import BaseSettings

from bergman_lab.errors import ConfigError


def parse_float_list(text: str) -> list[float]:
    """カンマ区切りの実数列をリストに変換"""
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid number list '{text}': {e}") from e


class Settings(BaseSettings):
    quad_radial: int = Field(64, ge=1)        # パネルあたりの Gauss-Legendre 節点数
    quad_angular: int = Field(256, ge=1)      # 角度方向の等分点数
    graded_panels: int = Field(24, ge=0)      # 境界 t=1 に集積する幾何分割パネル数
    default_order: int = Field(64, ge=1)      # 行列の打ち切り次数 N
    sweep_order: int = Field(256, ge=1)       # 半径 0.99 まで掃引する診断の N
    epsilon: float = 0.125
    delta: float = 0.25
    p: float = 2.0
    q: float = 1.0
    profile_q: float = 2.0                    # bound-check のノルム指数
    radii: str = "0,0.3,0.6,0.8,0.9,0.95,0.99"   # カンマ区切り
    angles: int = Field(16, ge=1)
    r_schedule: str = "0.9,0.99,0.999"           # カンマ区切り
    threads: Optional[int] = Field(None, ge=1)      # BERGMAN_LAB_THREADS（未設定なら CPU 数）
    seed: int = 20240101
    log_level: str = "INFO"

    model_config = {
        "env_file": ".env",
        "env_prefix": "bergman_lab_",
        "case_sensitive": False,
        "extra": "ignore",
    }

    def radii_list(self) -> list[float]:
        """既定の半径格子をリストとして返す"""
        return parse_float_list(self.radii)

    def r_schedule_list(self) -> list[float]:
        """打ち切り半径のスケジュールをリストとして返す"""
        return parse_float_list(self.r_schedule)


def load_config_file(path: str | Path) -> dict[str, str]:
    """フラットな KEY=value 形式の設定ファイルを読む

    キーはフラグ名（--r-schedule → r_schedule / r-schedule どちらも可）。
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {
        k.strip().lower().replace("-", "_"): v
        for k, v in values.items()
        if v is not None
    }


settings = Settings()
