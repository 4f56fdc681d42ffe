"""単位円板上の求積（正規化面積測度 λ、λ(Δ) = 1）

動径方向は t = r² の Gauss-Legendre（パネル分割）、角度方向は等分点のテンソル積。
境界特異な被積分関数には t = 1 に集積する幾何分割パネルを使い、
最後のパネル [1-h, 1] は 1-t = h·u⁴ と変数変換して (1-t)^(-α) の特異性を吸収する。

被積分関数は (w, gap) を受け取る。gap はノードでの 1-|w|² を桁落ちなしで保持したもの。
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_legendre

from bergman_lab.config import Settings, settings as default_settings
from bergman_lab.errors import DomainError, InsufficientResolutionError, NonFiniteIntegrandError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_BREAKPOINT_MATCH = 1e-15   # restrict() で r² をパネル端と同一視する許容差
_PEAK_ANGULAR_SCALE = 32.0  # ピーク幅 (1-ρ) あたりの角度点数
_PEAK_ANGULAR_MAX = 4096


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(n)
    return np.asarray(x, dtype=float), np.asarray(w, dtype=float)


@dataclass(frozen=True, eq=False)
class DiskQuadrature:
    """テンソル積の円板求積則

    ノードの順序は動径優先（i*n_angular + j）で固定され、総和の順序も固定される。
    """
    t: np.ndarray                 # 動径ノード t_i = |w|²
    gap: np.ndarray               # 1 - t_i（直接計算した値）
    log_t: np.ndarray             # log t_i
    radial_weights: np.ndarray    # 合計はパネルが覆う t の長さ
    n_radial: int                 # パネルあたりのノード数
    n_angular: int
    breakpoints: tuple[float, ...]
    graded_panels: int = 0
    limit: float = 1.0            # 制限則なら r²（積分域は rΔ）

    def __post_init__(self):
        # 境界近くでは t が 1.0 に丸まるので、判定は厳密な gap で行う
        if not np.all(np.isfinite(self.gap)) or np.any(self.gap <= 0.0) or np.any(self.t > 1.0):
            raise DomainError("quadrature nodes must lie strictly inside the unit disk")

    @property
    def graded(self) -> bool:
        return self.graded_panels > 0

    @cached_property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.t)

    @cached_property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular

    @cached_property
    def points(self) -> np.ndarray:
        return (self.radii[:, None] * np.exp(1j * self.angles)[None, :]).ravel()

    @cached_property
    def gaps(self) -> np.ndarray:
        return np.repeat(self.gap, self.n_angular)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.repeat(self.radial_weights / self.n_angular, self.n_angular)

    @property
    def size(self) -> int:
        return self.t.size * self.n_angular

    @property
    def radial_degree(self) -> int:
        """動径方向で厳密に積分できる t の多項式次数"""
        degree = 2 * self.n_radial - 1
        if self.graded:
            # 変数変換パネルでは tⁿ が u の 4n+3 次になる
            degree = min(degree, (2 * self.n_radial - 4) // 4)
        return max(degree, 0)

    @property
    def declared_degree(self) -> int:
        """wᵃw̄ᵇ を厳密に積分できる総次数 a+b の上限"""
        return max(0, min(self.n_angular - 1, 2 * self.radial_degree))

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.t.tobytes())
        h.update(self.radial_weights.tobytes())
        h.update(str(self.n_angular).encode())
        return h.hexdigest()[:16]

    def describe(self) -> dict:
        return {
            "n_radial": self.n_radial,
            "n_angular": self.n_angular,
            "graded_panels": self.graded_panels,
            "breakpoints": list(self.breakpoints),
            "fingerprint": self.fingerprint,
        }


@dataclass(frozen=True, eq=False)
class MomentTable:
    """M[a][b] = ∫ f(w) wᵃ w̄ᵇ dλ(w)、0 ≤ a, b < order"""
    order: int
    entries: np.ndarray = field(repr=False)
    symbol_id: str = ""


def _panel_edges(breakpoints, graded_panels: int) -> list[float]:
    edges = {0.0}
    for b in breakpoints:
        b = float(b)
        if not 0.0 <= b < 1.0:
            raise DomainError(f"panel breakpoint {b} outside [0, 1)")
        edges.add(b)
    for j in range(1, graded_panels + 1):
        edges.add(1.0 - 2.0 ** (-j))
    return sorted(edges) + [1.0]


def build_rule(
    n_radial: int,
    n_angular: int,
    graded_panels: int = 0,
    breakpoints=(),
) -> DiskQuadrature:
    """テンソル積の求積則を作る

    Args:
        n_radial: パネルあたりの Gauss-Legendre ノード数
        n_angular: 等分角度点の数
        graded_panels: t = 1 - 2^(-j) (j=1..graded_panels) の幾何分割パネル数（0 で分割なし）
        breakpoints: 追加の t 方向のパネル端（指示関数の不連続 r² など）
    """
    if n_radial < 1 or n_angular < 1:
        raise DomainError(f"rule sizes must be positive, got n_radial={n_radial}, n_angular={n_angular}")
    if graded_panels < 0:
        raise DomainError("graded panel count must be nonnegative")
    edges = _panel_edges(breakpoints, graded_panels)

    ts, gaps, ws = [], [], []
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        last = k == len(edges) - 2
        if last and graded_panels > 0:
            # 1 - t = h·u⁴, dt = 4h·u³ du
            x, w = _legendre(max(n_radial, 2))
            h = 1.0 - a
            u = 0.5 * (x + 1.0)
            gap = h * u ** 4
            ts.append(1.0 - gap)
            gaps.append(gap)
            ws.append(4.0 * h * u ** 3 * 0.5 * w)
        else:
            x, w = _legendre(n_radial)
            half = 0.5 * (b - a)
            ts.append(a + half * (x + 1.0))
            gaps.append((1.0 - b) + half * (1.0 - x))
            ws.append(half * w)

    t = np.concatenate(ts)
    gap = np.concatenate(gaps)
    log_t = np.where(t < 0.5, np.log(np.maximum(t, 1e-300)), np.log1p(-np.minimum(gap, 0.5)))
    return DiskQuadrature(
        t=t,
        gap=gap,
        log_t=log_t,
        radial_weights=np.concatenate(ws),
        n_radial=n_radial,
        n_angular=n_angular,
        breakpoints=tuple(sorted(float(b) for b in set(breakpoints))),
        graded_panels=graded_panels,
    )


def restrict(rule: DiskQuadrature, r: float) -> DiskQuadrature:
    """rΔ 上の部分則（r² がパネル端であること）"""
    if not 0.0 < r < 1.0:
        raise DomainError(f"restriction radius must lie in (0, 1), got {r}")
    r2 = r * r
    if not any(abs(b - r2) <= _BREAKPOINT_MATCH for b in rule.breakpoints):
        raise DomainError(f"r² = {r2} is not a panel breakpoint of the rule")
    keep = rule.t < r2
    return DiskQuadrature(
        t=rule.t[keep],
        gap=rule.gap[keep],
        log_t=rule.log_t[keep],
        radial_weights=rule.radial_weights[keep],
        n_radial=rule.n_radial,
        n_angular=rule.n_angular,
        breakpoints=tuple(b for b in rule.breakpoints if b <= r2),
        graded_panels=0,
        limit=r2,
    )


def annulus(rule: DiskQuadrature, r: float) -> DiskQuadrature:
    """Δ∖rΔ̄ 上の部分則（r² がパネル端であること）"""
    if not 0.0 < r < 1.0:
        raise DomainError(f"annulus radius must lie in (0, 1), got {r}")
    r2 = r * r
    if not any(abs(b - r2) <= _BREAKPOINT_MATCH for b in rule.breakpoints):
        raise DomainError(f"r² = {r2} is not a panel breakpoint of the rule")
    keep = rule.t > r2
    return DiskQuadrature(
        t=rule.t[keep],
        gap=rule.gap[keep],
        log_t=rule.log_t[keep],
        radial_weights=rule.radial_weights[keep],
        n_radial=rule.n_radial,
        n_angular=rule.n_angular,
        breakpoints=tuple(b for b in rule.breakpoints if b >= r2),
        graded_panels=rule.graded_panels,
    )


def rule_for_symbol(symbol, order: int = 1, cfg: Optional[Settings] = None) -> DiskQuadrature:
    """シンボルと行列次数 N に合わせた求積則

    角度点は 2N 以上、動径ノードは N/2 以上（tᴺ⁻¹ まで厳密）。
    境界特異なシンボルには幾何分割、指示関数には不連続点をパネル端として入れる。
    """
    cfg = cfg or default_settings
    graded = cfg.graded_panels if getattr(symbol, "boundary_singular", False) else 0
    return build_rule(
        n_radial=max(cfg.quad_radial, math.ceil(order / 2)),
        n_angular=max(cfg.quad_angular, 2 * order),
        graded_panels=graded,
        breakpoints=getattr(symbol, "breakpoints", ()),
    )


def peak_angular_count(rho: float, base: int = 256) -> int:
    """|z| = rho 付近に幅 (1-rho) のピークを持つ被積分関数向けの角度点数（2 の冪）"""
    need = _PEAK_ANGULAR_SCALE / max(1.0 - rho, 1e-6)
    count = 1 << max(0, math.ceil(math.log2(need)))
    return int(min(max(count, base), _PEAK_ANGULAR_MAX))


def peak_panels(rho: float, cap: int, margin: int = 8) -> int:
    """境界特異性のない被積分関数のピーク用: log2(1/(1-rho)) + margin 枚の幾何分割パネル"""
    return min(cap, int(math.ceil(math.log2(1.0 / max(1.0 - rho, 1e-12)))) + margin)


def peak_rule(
    rho: float,
    n_radial: int = 32,
    base_angular: int = 256,
    graded_panels: int = 24,
    breakpoints=(),
) -> DiskQuadrature:
    """境界近くの点 rho で尖る被積分関数用の則（幾何分割 + 角度点の自動増加）"""
    return build_rule(
        n_radial=n_radial,
        n_angular=peak_angular_count(rho, base_angular),
        graded_panels=graded_panels,
        breakpoints=breakpoints,
    )


def symbol_peak_rule(symbol, rho: float, cfg: Optional[Settings] = None) -> DiskQuadrature:
    """シンボル × |z| = rho で尖る核の積分用の則

    境界特異なシンボルには全パネル、それ以外はピーク幅に合わせたパネル数を使う。
    """
    cfg = cfg or default_settings
    if getattr(symbol, "boundary_singular", False):
        panels = cfg.graded_panels
    else:
        panels = peak_panels(rho, cfg.graded_panels)
    return peak_rule(
        rho,
        n_radial=cfg.quad_radial,
        base_angular=cfg.quad_angular,
        graded_panels=panels,
        breakpoints=getattr(symbol, "breakpoints", ()),
    )


def evaluate_nodes(rule: DiskQuadrature, fn: Integrand) -> np.ndarray:
    values = np.asarray(fn(rule.points, rule.gaps), dtype=complex)
    values = np.broadcast_to(values, (rule.size,))
    finite = np.isfinite(values)
    if not finite.all():
        idx = int(np.argmin(finite))
        raise NonFiniteIntegrandError(idx, complex(rule.points[idx]), complex(values[idx]))
    return values


def integrate(rule: DiskQuadrature, fn: Integrand) -> complex:
    """Σ weightᵢ·fn(wᵢ)（固定順序・補償付き総和）"""
    products = rule.weights * evaluate_nodes(rule, fn)
    return complex(math.fsum(products.real), math.fsum(products.imag))


def integrate_values(rule: DiskQuadrature, values: np.ndarray) -> complex:
    """評価済みのノード値を積分する"""
    values = np.asarray(values, dtype=complex)
    products = rule.weights * values
    return complex(math.fsum(products.real), math.fsum(products.imag))


def lp_norm(rule: DiskQuadrature, fn: Integrand, p: float) -> float:
    """(∫|fn|ᵖ dλ)^(1/p)"""
    if not p >= 1.0:
        raise DomainError(f"L^p norm needs p >= 1, got {p}")
    total = integrate(rule, lambda w, gap: np.abs(fn(w, gap)) ** p).real
    return max(total, 0.0) ** (1.0 / p)


def radial_powers(rule: DiskQuadrature, count: int) -> np.ndarray:
    """r_iⁿ（n = 0..count-1）の表、形状 (動径ノード数, count)"""
    n = np.arange(count, dtype=float)
    return np.exp(0.5 * n[None, :] * rule.log_t[:, None])


def monomial_moments(rule: DiskQuadrature, f: Integrand, order: int) -> MomentTable:
    """M[a][b] = ∫ f wᵃ w̄ᵇ dλ（角度方向は FFT、動径方向は重み付き和）"""
    if order < 1:
        raise DomainError(f"moment order must be positive, got {order}")
    if rule.n_angular <= 2 * order - 2:
        raise InsufficientResolutionError(
            f"insufficient angular resolution: n_angular={rule.n_angular} <= 2N-2={2 * order - 2}"
        )
    if rule.declared_degree < 2 * order - 2:
        logger.debug("rule declared degree %d below 2N-2=%d", rule.declared_degree, 2 * order - 2)
    grid = evaluate_nodes(rule, f).reshape(rule.t.size, rule.n_angular)
    # F[i, k] = (1/M) Σ_j f(r_i, θ_j) e^{ikθ_j}
    spectrum = np.fft.ifft(grid, axis=1)
    powers = radial_powers(rule, 2 * order - 1) * rule.radial_weights[:, None]
    b = np.arange(order)
    entries = np.empty((order, order), dtype=complex)
    for a in range(order):
        cols = spectrum[:, (a - b) % rule.n_angular]
        entries[a, :] = np.sum(powers[:, a:a + order] * cols, axis=0)
    return MomentTable(order=order, entries=entries, symbol_id=getattr(f, "id", ""))


def evaluate_power_series(rule: DiskQuadrature, coeffs: np.ndarray) -> np.ndarray:
    """Σ_n cₙ wⁿ を全ノードで評価（半径ごとの FFT、n は角度点数で折り返す）"""
    coeffs = np.asarray(coeffs, dtype=complex)
    m = rule.n_angular
    scaled = coeffs[None, :] * radial_powers(rule, coeffs.size)
    pad = (-coeffs.size) % m
    if pad:
        scaled = np.concatenate([scaled, np.zeros((scaled.shape[0], pad), dtype=complex)], axis=1)
    folded = scaled.reshape(scaled.shape[0], -1, m).sum(axis=1)
    return (m * np.fft.ifft(folded, axis=1)).ravel()
