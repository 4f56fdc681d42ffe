"""
bergman-lab をスタンドアロンで実行するスクリプト。

使い方:
    python scripts/bergman_lab.py verify                                  # 全スイート
    python scripts/bergman_lab.py verify --suite geometry
    python scripts/bergman_lab.py compact-check --symbol "disk(0.5)" --N 64
    python scripts/bergman_lab.py bound-check --symbol "(1-abs(w)^2)^(-0.75)" --N 256
    python scripts/bergman_lab.py luecking --atoms "0.5,0,1" --p 2 --q 1
"""

import sys
import os

# プロジェクトルートをパスに追加
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from bergman_lab.cli import main


if __name__ == "__main__":
    sys.exit(main())
