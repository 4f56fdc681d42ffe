"""Luecking の埋め込み判定

k(w) = μ(D(w,δ)) / λ(D(w,δ)) を双曲的に等間隔な格子で求め、‖k‖_{L^s} の細分化に対する
振る舞いから埋め込み L^p_a ⊂ L^q(μ) の成否を判定する。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bergman_lab.constants import (
    ATOM_TIE_TOL,
    EMBEDDING_GROWTH_FACTOR,
    EMBEDDING_STABLE_REL,
    VERDICT_EMBEDDING_FAILS,
    VERDICT_EMBEDDING_HOLDS,
    VERDICT_INCONCLUSIVE,
    MeasureKind,
)
from bergman_lab.errors import ConfigError, DomainError
from bergman_lab.models import DiagnosticsReport, EmbeddingQuery
from bergman_lab.services.geometry import check_points, disk_center_from_gap, disk_radius_from_gap
from bergman_lab.services.quadrature import DiskQuadrature, build_rule
from bergman_lab.services.sweep import sweep
from bergman_lab.services.symbols import Symbol, builtin_symbol

logger = logging.getLogger(__name__)

_LOCAL_RADIAL = 16
_LOCAL_ANGULAR = 32
_BASE_STEP = 0.125          # レベル 0 の双曲刻み h
_SPAN_PER_LEVEL = 6.0       # レベル L の双曲半径の上限 H = 6(L+1)
_GRID_ANGLES = 32


@dataclass(frozen=True)
class MeasureSpec:
    """単位円板上の正値ボレル測度（密度 × λ、または点質量の和）"""
    kind: MeasureKind
    density: Optional[Symbol] = None
    atoms: tuple[tuple[complex, float], ...] = field(default=())

    def __post_init__(self):
        if self.kind == "density":
            if self.density is None:
                raise ConfigError("density measure needs a density symbol")
            self.density.ensure_integrable()
        elif self.kind == "atoms":
            if not self.atoms:
                raise ConfigError("atomic measure needs at least one atom")
            for point, mass in self.atoms:
                check_points(point, "atom")
                if not mass > 0.0:
                    raise ConfigError(f"atom masses must be positive, got {mass}")
        else:
            raise ConfigError(f"unknown measure kind '{self.kind}'")

    @property
    def label(self) -> str:
        if self.kind == "density":
            return self.density.id
        return "atoms[" + ";".join(f"{p.real:.17g},{p.imag:.17g},{m:.17g}" for p, m in self.atoms) + "]"


def area_measure(scale: float = 1.0) -> MeasureSpec:
    """c·λ"""
    return MeasureSpec(kind="density", density=builtin_symbol("const", repr(float(scale))))


def parse_atoms(text: str) -> MeasureSpec:
    """"re,im,mass;re,im,mass;..." を点質量の測度に変換"""
    atoms = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        if len(parts) != 3:
            raise ConfigError(f"atom '{chunk}' must be 're,im,mass'")
        try:
            re_, im_, mass = (float(x) for x in parts)
        except ValueError as e:
            raise ConfigError(f"invalid atom '{chunk}': {e}") from e
        atoms.append((complex(re_, im_), mass))
    return MeasureSpec(kind="atoms", atoms=tuple(atoms))


def local_rule(n_radial: int = _LOCAL_RADIAL, n_angular: int = _LOCAL_ANGULAR) -> DiskQuadrature:
    """D(w,δ) を φ_w で引き戻すための中心 0 の基準則（単位円板上）"""
    return build_rule(n_radial, n_angular)


def _density_ratio(density: Symbol, w: np.ndarray, gap: np.ndarray, s: float, rule: DiskQuadrature) -> np.ndarray:
    """μ(D)/λ(D)（密度測度）を複数の中心 w について計算

    D = φ_w(sΔ) 上の求積: ノード v = φ_w(sξ)、ヤコビアンは |k_w(sξ)|²。
    1-|v|² = (1-|w|²)(1-|sξ|²)/|1-w̄sξ|² を使う。比は同じ則での λ(D) の近似で割る。
    """
    eta = s * rule.points                                   # (nodes,)
    eta_gap = 1.0 - (s * s) * rule.t.repeat(rule.n_angular)
    denom = 1.0 - np.conj(w)[:, None] * eta[None, :]        # (centers, nodes)
    v = (w[:, None] - eta[None, :]) / denom
    v_gap = gap[:, None] * eta_gap[None, :] / np.abs(denom) ** 2
    jac = gap[:, None] ** 2 / np.abs(denom) ** 4
    dens = np.asarray(density(v.ravel(), v_gap.ravel()), dtype=complex).reshape(v.shape)
    if np.any(dens.real < 0.0) or np.any(np.abs(dens.imag) > 1e-12 * np.maximum(np.abs(dens.real), 1.0)):
        raise DomainError(f"measure density '{density.id}' must be real and nonnegative")
    weighted = rule.weights[None, :] * jac
    return np.sum(weighted * dens.real, axis=1) / np.sum(weighted, axis=1)


def _atom_ratio(atoms, w: np.ndarray, gap: np.ndarray, s: float) -> np.ndarray:
    radius = disk_radius_from_gap(gap, s)
    center = disk_center_from_gap(w, gap, s)
    total = np.zeros(w.shape, dtype=float)
    for point, mass in atoms:
        inside = np.abs(point - center) <= radius + ATOM_TIE_TOL
        total += np.where(inside, mass, 0.0)
    return total / radius ** 2


def _k_values(mu: MeasureSpec, w: np.ndarray, gap: np.ndarray, delta: float, rule: Optional[DiskQuadrature]) -> np.ndarray:
    s = math.tanh(delta)
    if mu.kind == "atoms":
        return _atom_ratio(mu.atoms, w, gap, s)
    return _density_ratio(mu.density, w, gap, s, rule or local_rule())


def k_function(mu: MeasureSpec, w, delta: float, rule: Optional[DiskQuadrature] = None):
    """k(w) = μ(D(w,δ)) / λ(D(w,δ))"""
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    arr = check_points(w, "w")
    flat = np.atleast_1d(arr).ravel()
    values = _k_values(mu, flat, 1.0 - np.abs(flat) ** 2, delta, rule)
    return float(values[0]) if arr.ndim == 0 else values.reshape(arr.shape)


def _level_grid(level: int) -> tuple[float, float, np.ndarray, np.ndarray]:
    """(h, H, 半径, 境界距離)。半径 tanh(jh)、境界距離 sech²(jh)"""
    h = _BASE_STEP / 2 ** level
    span = _SPAN_PER_LEVEL * (level + 1)
    j = np.arange(int(round(span / h)) + 1)
    x = j * h
    return h, span, np.tanh(x), 1.0 / np.cosh(x) ** 2


def ks_integral(radial_means: np.ndarray, gaps: np.ndarray) -> float:
    """∫ k^s dλ ≈ t 方向の台形則 + 外側セル [t_J, 1] を k_J^s で延長"""
    # t_{j+1} - t_j = gap_j - gap_{j+1}
    dt = gaps[:-1] - gaps[1:]
    cells = 0.5 * dt * (radial_means[:-1] + radial_means[1:])
    return math.fsum(cells) + float(gaps[-1] * radial_means[-1])


def ks_norm(mu: MeasureSpec, query: EmbeddingQuery, level: int, angles: int = _GRID_ANGLES,
            rule: Optional[DiskQuadrature] = None, threads: Optional[int] = None) -> dict:
    """細分化レベル level での ‖k‖_{L^s} の推定"""
    h, span, radii, gaps = _level_grid(level)
    theta = np.exp(2j * np.pi * np.arange(angles) / angles)
    s_exp = query.s

    def _radius(index: int) -> float:
        w = radii[index] * theta
        k = _k_values(mu, w, np.full(angles, gaps[index]), query.delta, rule)
        return float(np.mean(k ** s_exp))

    means = np.array(sweep(_radius, range(radii.size), threads))
    integral = ks_integral(means, gaps)
    return {
        "level": level,
        "h": h,
        "H": span,
        "radii": int(radii.size),
        "points": int(radii.size * angles),
        "integral": integral,
        "norm": integral ** (1.0 / s_exp),
    }


def decide(norms: list[float]) -> str:
    """最後の 2 つの比で判定（10% 以内なら成立、両方 2 倍以上なら不成立）"""
    if len(norms) < 3:
        return VERDICT_INCONCLUSIVE
    ratios = [b / a if a > 0.0 else math.inf for a, b in zip(norms[:-1], norms[1:])][-2:]
    if all(abs(r - 1.0) <= EMBEDDING_STABLE_REL for r in ratios):
        return VERDICT_EMBEDDING_HOLDS
    if all(r >= EMBEDDING_GROWTH_FACTOR for r in ratios):
        return VERDICT_EMBEDDING_FAILS
    return VERDICT_INCONCLUSIVE


def embedding_check(
    mu: MeasureSpec,
    query: EmbeddingQuery,
    levels: int = 4,
    angles: int = _GRID_ANGLES,
    rule: Optional[DiskQuadrature] = None,
    threads: Optional[int] = None,
) -> DiagnosticsReport:
    """‖k‖_{L^s} を細分化しながら推定し、埋め込みの成否を判定する"""
    rows = []
    for level in range(levels):
        row = ks_norm(mu, query, level, angles, rule, threads)
        logger.debug("embedding level %d: norm=%.6g over %d points", level, row["norm"], row["points"])
        rows.append(row)
    norms = [r["norm"] for r in rows]
    verdict = decide(norms)
    logger.info("luecking %s (s=%.4g): verdict=%s", mu.label, query.s, verdict)
    return DiagnosticsReport(
        kind="embedding",
        symbol=mu.label,
        parameters={"p": query.p, "q": query.q, "delta": query.delta, "s": query.s, "measure": mu.kind},
        grid={"levels": levels, "angles": angles, "base_step": _BASE_STEP, "span_per_level": _SPAN_PER_LEVEL},
        values=rows,
        summary={
            "norms": norms,
            "ratios": [b / a if a > 0.0 else None for a, b in zip(norms[:-1], norms[1:])],
            "norm": norms[-1] if norms else None,
            "verdict": verdict,
        },
        tolerances={"stable_rel": EMBEDDING_STABLE_REL, "growth_factor": EMBEDDING_GROWTH_FACTOR},
    )
