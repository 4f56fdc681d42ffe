"""共有フィクスチャ"""

import numpy as np
import pytest

from bergman_lab.config import Settings
from bergman_lab.services.quadrature import build_rule


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240101)


@pytest.fixture
def cfg() -> Settings:
    """テスト用の小さめの既定値（環境変数の影響を受けない）"""
    return Settings(
        quad_radial=32,
        quad_angular=128,
        graded_panels=24,
        default_order=32,
        sweep_order=128,
        threads=1,
        _env_file=None,
    )


@pytest.fixture
def rule():
    """多項式の被積分関数を厳密に積分する標準則"""
    return build_rule(32, 128)


@pytest.fixture
def graded_rule():
    """境界特異な被積分関数用（角度方向は 1 点）"""
    return build_rule(32, 1, graded_panels=24)
