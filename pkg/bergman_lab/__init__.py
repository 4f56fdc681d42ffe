"""bergman-lab: ベルグマン空間上のテープリッツ作用素を数値的に検証するラボ"""

__version__ = "0.1.0"
