"""メビウス変換・ベルグマン核・双曲距離・双曲円板→ユークリッド円板の変換

すべて numpy でベクトル化されており、スカラー入力にはスカラーを返す。
"""

import logging
from dataclasses import dataclass

import numpy as np

from bergman_lab.constants import POINT_CAP
from bergman_lab.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EuclideanDisk:
    """ユークリッド円板 |w - center| < radius"""
    center: complex
    radius: float

    def contains(self, w, tol: float = 0.0):
        """w が円板内（境界から tol 以内を含む）か"""
        return np.abs(np.asarray(w) - self.center) <= self.radius + tol


@dataclass(frozen=True)
class HyperbolicDiskSpec:
    """ベルグマン距離の球 D(center, delta)"""
    center: complex
    delta: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise DomainError(f"hyperbolic radius must be positive, got {self.delta}")
        check_points(self.center, "center")


def check_points(z, name: str = "z") -> np.ndarray:
    """単位円板内の点として検証し、複素配列を返す"""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} is not finite")
    mag = np.abs(arr)
    if np.any(mag >= POINT_CAP):
        worst = arr.flat[int(np.argmax(mag))]
        raise DomainError(f"{name}={worst:.17g} is not inside the unit disk (|{name}| >= 1 - 1e-12)")
    return arr


def _out(x: np.ndarray, real: bool = False):
    """0 次元配列ならスカラーに戻す"""
    if np.ndim(x) == 0:
        return float(np.real(x)) if real else complex(x)
    return np.real(x) if real else x


def mobius(z, w):
    """φ_z(w) = (z - w) / (1 - z̄w)"""
    z = check_points(z, "z")
    w = check_points(w, "w")
    return _out((z - w) / (1.0 - np.conj(z) * w))


def mobius_gap(z, w, w_gap=None):
    """1 - |φ_z(w)|² を桁落ちなしで計算

    恒等式 1 - |φ_z(w)|² = (1-|z|²)(1-|w|²) / |1-z̄w|² を使う。
    w_gap に 1-|w|² を渡すと境界近くでも精度が落ちない。
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if w_gap is None:
        w_gap = 1.0 - np.abs(w) ** 2
    return _out((1.0 - np.abs(z) ** 2) * w_gap / np.abs(1.0 - np.conj(z) * w) ** 2, real=True)


def mobius_derivative(z, w):
    """φ_z'(w) = -(1-|z|²) / (1-z̄w)² = -k_z(w)"""
    return _out(-np.asarray(normalized_kernel(z, w)))


def unitary_apply(z, h, w):
    """(U_z h)(w) = h(φ_z(w))·φ_z'(w)

    U_z はベルグマン空間上のユニタリかつ自己逆。U_z 1 = -k_z。
    h は単位円板上の点の配列を受け取る関数。
    """
    phi = np.asarray(mobius(z, w))
    return _out(np.asarray(h(phi), dtype=complex) * np.asarray(mobius_derivative(z, w)))


def bergman_kernel(z, w):
    """K_z(w) = 1 / (1 - z̄w)²"""
    z = check_points(z, "z")
    w = check_points(w, "w")
    return _out(1.0 / (1.0 - np.conj(z) * w) ** 2)


def normalized_kernel(z, w):
    """k_z(w) = (1-|z|²) / (1 - z̄w)²、‖k_z‖₂ = 1"""
    z = check_points(z, "z")
    w = check_points(w, "w")
    return _out((1.0 - np.abs(z) ** 2) / (1.0 - np.conj(z) * w) ** 2)


def bergman_distance(z, w):
    """B(z,w) = ½ log((1+|φ_z(w)|)/(1-|φ_z(w)|))

    (1+ρ)/(1-ρ) = (1+ρ)²/(1-ρ²) として 1-ρ² を mobius_gap から取る。
    """
    z = check_points(z, "z")
    w = check_points(w, "w")
    rho = np.abs((z - w) / (1.0 - np.conj(z) * w))
    gap = np.asarray(mobius_gap(z, w))
    return _out(np.log1p(rho) - 0.5 * np.log(gap), real=True)


def euclidean_disk(z: complex, s: float) -> EuclideanDisk:
    """{w: |φ_z(w)| < s} をユークリッド円板 (C, R) として返す

    C = (1-s²)z / (1-s²|z|²)、R = (1-|z|²)s / (1-s²|z|²)
    """
    z = complex(check_points(z, "z"))
    if not 0.0 < s < 1.0:
        raise DomainError(f"pseudo-hyperbolic radius must lie in (0, 1), got {s}")
    x = abs(z) ** 2
    denom = 1.0 - s * s * x
    return EuclideanDisk(center=(1.0 - s * s) * z / denom, radius=(1.0 - x) * s / denom)


def hyperbolic_to_euclidean(spec: HyperbolicDiskSpec) -> EuclideanDisk:
    """D(z, δ) = {w: B(z,w) < δ} のユークリッド中心・半径（s = tanh δ）"""
    return euclidean_disk(spec.center, float(np.tanh(spec.delta)))


def disk_radius_from_gap(gap, s: float):
    """1-|z|² = gap の点を中心とする擬双曲円板の半径 R

    R = gap·s / (1 - s² + s²·gap)。|z| が 1 に丸められる点でも使える。
    """
    gap = np.asarray(gap, dtype=float)
    return gap * s / (1.0 - s * s + s * s * gap)


def disk_center_from_gap(z, gap, s: float):
    """擬双曲円板の中心 C = (1-s²)z / (1 - s² + s²·gap)"""
    return (1.0 - s * s) * np.asarray(z, dtype=complex) / (1.0 - s * s + s * s * np.asarray(gap, dtype=float))


def random_disk_points(rng: np.random.Generator, count: int, max_radius: float) -> np.ndarray:
    """半径 max_radius の円板上の一様乱数点"""
    r = max_radius * np.sqrt(rng.random(count))
    theta = 2.0 * np.pi * rng.random(count)
    return r * np.exp(1j * theta)


def grid_points(radii, angles: int) -> list[tuple[float, int, complex]]:
    """半径 × 等分角度の格子点 (radius, angle_index, z) を半径順に返す"""
    points = []
    for rho in radii:
        for j in range(angles):
            points.append((float(rho), j, complex(rho * np.exp(2j * np.pi * j / angles))))
    return points
