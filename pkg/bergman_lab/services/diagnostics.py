"""有界性・コンパクト性の診断、係数抽出の恒等式、経験的 Schur 定数

格子上の値は有界性・コンパクト性を「支持」するだけで証明はしない。
判定（verdict）は報告データであり、終了コードには影響しない。
"""

import logging
import math
from typing import Optional

import numpy as np

from bergman_lab.config import Settings, settings as default_settings
from bergman_lab.constants import (
    BOUNDARY_GROWTH_FACTOR,
    COMPACT_DECAY_FACTOR,
    KERNEL_REFINE_EXTRA,
    SERIES_TAIL_TOL,
    VERDICT_BOUNDED,
    VERDICT_COMPACT,
    VERDICT_NOT_COMPACT,
    VERDICT_UNBOUNDED,
)
from bergman_lab.errors import DomainError
from bergman_lab.models import DiagnosticsReport, SchurWeightSpec
from bergman_lab.services.bergman import schur_col_integral, schur_normalizer, schur_row_integral
from bergman_lab.services.geometry import check_points, grid_points
from bergman_lab.services.quadrature import (
    annulus,
    build_rule,
    evaluate_power_series,
    integrate_values,
    peak_panels,
    peak_rule,
    restrict,
)
from bergman_lab.services.sweep import sweep
from bergman_lab.services.toeplitz import (
    ToeplitzMatrix,
    assemble,
    berezin_at_points,
    hilbert_schmidt_norm,
    kernel_coefficients,
    kernel_truncation_deficit,
    operator_norm,
    truncated_operator,
    truncation_remainder,
)

logger = logging.getLogger(__name__)

_PROFILE_DEFICIT_WARN = 1e-6   # 最大半径での核の打ち切り不足がこれを超えたら警告


def _trend(rows: list[dict], key: str) -> list[float]:
    """半径ごとに角度方向の最大値を取る（半径の昇順）"""
    best: dict[float, float] = {}
    for row in rows:
        best[row["radius"]] = max(best.get(row["radius"], -math.inf), row[key])
    return [best[r] for r in sorted(best)]


def _increasing_signature(trend: list[float]) -> bool:
    """最後の 3 点が単調増加し、かつ 10% 以上増えているか"""
    if len(trend) < 3:
        return False
    a, b, c = trend[-3:]
    return a < b < c and c >= BOUNDARY_GROWTH_FACTOR * a


def _decays(seq: list[float], steps: int = 3) -> bool:
    """最後の steps ステップすべてで COMPACT_DECAY_FACTOR 倍以上減衰しているか"""
    if len(seq) < 2:
        return False
    tail = seq[-(steps + 1):]
    for prev, cur in zip(tail[:-1], tail[1:]):
        if cur == 0.0 and prev == 0.0:
            continue
        if not prev >= COMPACT_DECAY_FACTOR * cur:
            return False
    return True


def _warn_truncation(order: int, radius: float, label: str) -> None:
    deficit = kernel_truncation_deficit(radius, order)
    if deficit > _PROFILE_DEFICIT_WARN:
        logger.warning(
            "%s: kernel truncation deficit %.3g at radius %.4g with N=%d; consider a larger N",
            label, deficit, radius, order,
        )


# ---------------------------------------------------------------------------
# ‖T_{f∘φ_z}1‖_q のプロファイル
# ---------------------------------------------------------------------------

def invariant_norm(matrix: ToeplitzMatrix, z: complex, q: float = 2.0, cfg: Optional[Settings] = None) -> float:
    """‖T_{f∘φ_z}1‖_q

    q = 2 では ‖T_f k_z‖₂（係数ベクトルのノルム）。
    q < 2 では ∫|T_f k_z(u)|^q |k_z(u)|^(2-q) dλ(u) を |z| 付近に集中した則で計算する。
    """
    if not 1.0 <= q <= 2.0:
        raise DomainError(f"profile exponent q must lie in [1, 2], got {q}")
    cfg = cfg or default_settings
    kz = kernel_coefficients(z, matrix.order)
    applied = matrix.entries @ kz.coeffs
    if q == 2.0:
        return float(np.linalg.norm(applied))
    rho = abs(kz.z)
    rule = peak_rule(rho, n_radial=32, base_angular=cfg.quad_angular,
                     graded_panels=peak_panels(rho, cfg.graded_panels))
    values = evaluate_power_series(rule, np.sqrt(np.arange(matrix.order) + 1.0) * applied)
    w = rule.points
    kz_abs = (1.0 - rho * rho) / np.abs(1.0 - np.conj(kz.z) * w) ** 2
    total = integrate_values(rule, np.abs(values) ** q * kz_abs ** (2.0 - q)).real
    return max(total, 0.0) ** (1.0 / q)


def invariant_norm_profile(
    matrix: ToeplitzMatrix,
    radii,
    angles: int,
    q: float = 2.0,
    cfg: Optional[Settings] = None,
    threads: Optional[int] = None,
) -> DiagnosticsReport:
    """格子上の ‖T_{f∘φ_z}1‖_q、その上限と境界へ向かう傾向"""
    if not 1.0 <= q <= 2.0:
        raise DomainError(f"profile exponent q must lie in [1, 2], got {q}")
    radii = sorted(float(r) for r in radii)
    if radii:
        _warn_truncation(matrix.order, radii[-1], "invariant norm profile")
    points = grid_points(radii, angles)
    norms = sweep(lambda p: invariant_norm(matrix, p[2], q, cfg), points, threads)
    rows = [
        {"radius": rho, "angle": j, "re": z.real, "im": z.imag, "norm": value}
        for (rho, j, z), value in zip(points, norms)
    ]
    trend = _trend(rows, "norm")
    return DiagnosticsReport(
        kind="boundedness",
        symbol=matrix.symbol_id,
        parameters={"N": matrix.order, "q": q},
        grid={"radii": radii, "angles": angles},
        values=rows,
        summary={"sup": max(trend) if trend else None, "trend": trend},
    )


def bound_check(
    f,
    order: int,
    radii,
    angles: int,
    q: float = 2.0,
    cfg: Optional[Settings] = None,
    threads: Optional[int] = None,
) -> DiagnosticsReport:
    """T_f と T_f̄ の両方のプロファイルから有界性を判定する"""
    matrix = assemble(f, order, cfg=cfg)
    direct = invariant_norm_profile(matrix, radii, angles, q, cfg, threads)
    adjoint = invariant_norm_profile(matrix.adjoint(), radii, angles, q, cfg, threads)
    rows = []
    for a, b in zip(direct.values, adjoint.values):
        row = dict(a)
        row["norm_conj"] = b["norm"]
        rows.append(row)
    trend = [max(a, b) for a, b in zip(direct.summary["trend"], adjoint.summary["trend"])]
    verdict = VERDICT_UNBOUNDED if _increasing_signature(trend) else VERDICT_BOUNDED
    logger.info("bound-check %s: sup=%.6g verdict=%s", f.id, max(trend) if trend else float("nan"), verdict)
    return DiagnosticsReport(
        kind="boundedness",
        symbol=f.id,
        parameters={"N": order, "q": q, "flags": f.flags()},
        grid=direct.grid,
        values=rows,
        summary={
            "sup": max(trend) if trend else None,
            "trend": trend,
            "trend_symbol": direct.summary["trend"],
            "trend_conjugate": adjoint.summary["trend"],
            "verdict": verdict,
        },
        tolerances={"growth_factor": BOUNDARY_GROWTH_FACTOR},
    )


# ---------------------------------------------------------------------------
# コンパクト性
# ---------------------------------------------------------------------------

def compactness_diagnostic(
    f,
    order: int,
    radii,
    angles: int,
    r_schedule,
    cfg: Optional[Settings] = None,
) -> DiagnosticsReport:
    """ベレジン変換の境界プロファイルと ‖A(I - D_r)‖ の減衰からコンパクト性を判定する"""
    matrix = assemble(f, order, cfg=cfg)
    radii = sorted(float(r) for r in radii)
    schedule = sorted(float(r) for r in r_schedule)
    if radii:
        _warn_truncation(order, radii[-1], "Berezin boundary profile")

    points = grid_points(radii, angles)
    zs = np.array([p[2] for p in points], dtype=complex)
    berezin = berezin_at_points(matrix, zs) if zs.size else np.zeros(0, dtype=complex)
    rows = [
        {"radius": rho, "angle": j, "re": z.real, "im": z.imag,
         "berezin_re": b.real, "berezin_im": b.imag, "berezin_abs": abs(b)}
        for (rho, j, z), b in zip(points, berezin)
    ]
    profile = _trend(rows, "berezin_abs")

    norm = operator_norm(matrix)
    truncation = []
    for r in schedule:
        remainder = operator_norm(truncation_remainder(matrix, r))
        hs = hilbert_schmidt_norm(truncated_operator(matrix, r))
        truncation.append({
            "r": r,
            "remainder_norm": remainder,
            "hs_norm": hs,
            "hs_column_bound": math.sqrt(norm * norm * r ** 4 / (1.0 - r ** 4)),
            "kernel_bound": r * r / (1.0 - r * r),
            "hs_kernel_bound": math.sqrt(norm * norm * r * r / (1.0 - r * r)),
        })
    remainders = [t["remainder_norm"] for t in truncation]

    compact = _decays(profile) and _decays(remainders)
    verdict = VERDICT_COMPACT if compact else VERDICT_NOT_COMPACT
    logger.info("compact-check %s: verdict=%s", getattr(f, "id", "?"), verdict)
    return DiagnosticsReport(
        kind="compactness",
        symbol=getattr(f, "id", None),
        parameters={"N": order, "operator_norm": norm, "flags": f.flags()},
        grid={"radii": radii, "angles": angles, "r_schedule": schedule},
        values=rows,
        summary={
            "berezin_profile": profile,
            "truncation": truncation,
            "verdict": verdict,
        },
        tolerances={"decay_factor": COMPACT_DECAY_FACTOR},
    )


# ---------------------------------------------------------------------------
# 係数抽出の恒等式
# ---------------------------------------------------------------------------

def coefficient_extraction(
    f,
    z: complex,
    p: int,
    r: float,
    order: int,
    rule=None,
    berezin_order: int = 128,
    cfg: Optional[Settings] = None,
) -> tuple[complex, complex]:
    """(lhs, rhs) を返す

    lhs = ∫_{rΔ} Ã(φ_z(v)) v̄ᵖ / (1-|v|²)² dλ(v)
    rhs = r^(2p+2)·Σ_m (m+1)⟨A_z wᵐ, w^(m+p)⟩ r^(2m)

    A_z は f∘φ_z のテープリッツ行列。Ã(φ_z(v)) は A_z のベレジン変換の v での値に等しい。
    """
    if p < 0:
        raise DomainError(f"coefficient index p must be nonnegative, got {p}")
    if not 0.0 < r <= 0.9:
        raise DomainError(f"extraction radius must lie in (0, 0.9], got {r}")
    z = complex(check_points(z))
    composed = f.compose_mobius(z)

    a_z = assemble(composed, order, cfg=cfg)
    norm = operator_norm(a_z)
    rhs_terms = []
    for m in range(order - p):
        if m > 0 and norm * r ** (2 * m) / (1.0 - r * r) < SERIES_TAIL_TOL:
            break
        inner = a_z.entries[m + p, m] / math.sqrt((m + 1) * (m + p + 1))
        rhs_terms.append((m + 1) * inner * r ** (2 * m))
    rhs = r ** (2 * p + 2) * complex(math.fsum(t.real for t in rhs_terms), math.fsum(t.imag for t in rhs_terms))

    lhs_matrix = a_z if berezin_order <= order else assemble(composed, berezin_order, cfg=cfg)
    rule = rule or restrict(build_rule(48, max(128, 2 * p + 8), breakpoints=(r * r,)), r)
    v = rule.points
    values = berezin_at_points(lhs_matrix, v, rule.gaps) * np.conj(v) ** p / rule.gaps ** 2
    lhs = integrate_values(rule, values)
    return lhs, rhs


# ---------------------------------------------------------------------------
# 経験的 Schur 定数
# ---------------------------------------------------------------------------

def _truncation_schur(
    matrix: ToeplitzMatrix,
    refined: ToeplitzMatrix,
    rows: list[dict],
    points: list,
    epsilon: float,
    rho: float,
    r_schedule,
    cfg: Settings,
    threads: Optional[int],
) -> list[dict]:
    """T_f - T_f^[r] の核 χ_{Δ∖rΔ̄}(u)(T_f K_u)(v) に対する Schur 定数（r ごと）

    行積分は |u| > r の格子点だけが残るので、全体の c₁ をそこで取り直す。
    列積分は u を Δ∖rΔ̄ に制限する。c₁ の目安 ‖P(f∘φ_u)‖₂ = ‖T_f k_u‖₂ の上限も並べる。
    """
    weight = SchurWeightSpec(epsilon=epsilon, convention="weight-plain")
    entries = []
    for r in r_schedule:
        rule = annulus(
            peak_rule(rho, n_radial=32, base_angular=max(cfg.quad_angular, 2 * matrix.order + 32),
                      graded_panels=cfg.graded_panels, breakpoints=(r * r,)),
            r,
        )

        def _col(point, rule=rule) -> float:
            _, _, v = point
            return schur_col_integral(matrix, v, weight, rule, refined) / schur_normalizer(v, weight)

        c2 = max(sweep(_col, points, threads), default=0.0)
        outside = [row for row in rows if row["radius"] > r]
        c1 = max((row["c1"] for row in outside), default=None)
        projection = max(
            (invariant_norm(matrix, complex(row["re"], row["im"]), 2.0, cfg) for row in outside), default=None
        )
        logger.info("schur tail r=%.6g: c2=%.6g over %d points, %d grid points outside", r, c2, len(points), len(outside))
        entries.append({
            "r": r,
            "points_outside": len(outside),
            "c1": c1,
            "c2": c2,
            "schur_bound": math.sqrt(c1 * c2) if c1 is not None else None,
            "projection_sup": projection,
            "remainder_norm": operator_norm(truncation_remainder(matrix, r)),
        })
    return entries


def schur_constants(
    f,
    order: int,
    points,
    weight: SchurWeightSpec,
    cfg: Optional[Settings] = None,
    threads: Optional[int] = None,
    r_schedule=(),
) -> DiagnosticsReport:
    """格子点 u での c₁(u) = 行積分/g(u)²、c₂(u) = 列積分/g(u)² と √(sup c₁·sup c₂)

    次数 N+16 の行列で再計算して 1% を超えて変わると KernelTruncationError。
    r_schedule を渡すと T_f - T_f^[r] の Schur 定数を summary["truncation"] に加える。
    """
    cfg = cfg or default_settings
    points = list(points)
    matrix = assemble(f, order, cfg=cfg)
    refined = assemble(f, order + KERNEL_REFINE_EXTRA, cfg=cfg)
    rho = max((abs(p[2]) for p in points), default=0.0)
    rule = peak_rule(rho, n_radial=32, base_angular=max(cfg.quad_angular, 2 * order + 32),
                     graded_panels=cfg.graded_panels)

    def _one(point) -> dict:
        _, _, u = point
        row = schur_row_integral(matrix, u, weight, rule, refined)
        col = schur_col_integral(matrix, u, weight, rule, refined)
        scale = schur_normalizer(u, weight)
        return {"row": row, "col": col, "c1": row / scale, "c2": col / scale}

    results = sweep(_one, points, threads)
    rows = [
        {"radius": rho_, "angle": j, "re": u.real, "im": u.imag, **res}
        for (rho_, j, u), res in zip(points, results)
    ]
    sup1 = max((r["c1"] for r in rows), default=0.0)
    sup2 = max((r["c2"] for r in rows), default=0.0)
    summary = {
        "sup_c1": sup1,
        "sup_c2": sup2,
        "schur_bound": math.sqrt(sup1 * sup2),
        "operator_norm": operator_norm(matrix),
    }
    if r_schedule:
        summary["truncation"] = _truncation_schur(
            matrix, refined, rows, points, weight.epsilon, rho, r_schedule, cfg, threads
        )
    return DiagnosticsReport(
        kind="schur",
        symbol=getattr(f, "id", None),
        parameters={"N": order, "epsilon": weight.epsilon, "convention": weight.convention,
                    "r_schedule": list(r_schedule)},
        grid={"points": len(rows), "rule": rule.describe()},
        values=rows,
        summary=summary,
    )
