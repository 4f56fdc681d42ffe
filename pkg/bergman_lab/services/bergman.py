"""ベルグマン射影・ベレジン変換（直接求積）・作用素 S・Lemma 3 の比・Schur 積分"""

import logging
from typing import Optional

import numpy as np

from bergman_lab.constants import BEREZIN_GRADING_RADIUS, KERNEL_REFINE_REL
from bergman_lab.errors import DomainError, KernelTruncationError, NumericalError
from bergman_lab.models import SchurWeightSpec
from bergman_lab.services.geometry import check_points
from bergman_lab.services.quadrature import (
    DiskQuadrature,
    Integrand,
    evaluate_nodes,
    evaluate_power_series,
    integrate,
    integrate_values,
    lp_norm,
)

logger = logging.getLogger(__name__)


def _per_point(z, fn):
    """スカラー z ならスカラー、配列なら同じ形の配列を返す"""
    arr = check_points(z)
    if arr.ndim == 0:
        return fn(complex(arr))
    return np.array([fn(complex(v)) for v in arr.ravel()]).reshape(arr.shape)


def bergman_project(rule: DiskQuadrature, g: Integrand, z):
    """(Pg)(z) = ∫ g(w) conj(K_z(w)) dλ(w)"""
    values = evaluate_nodes(rule, g)
    w = rule.points

    def _one(zv: complex) -> complex:
        return integrate_values(rule, values / (1.0 - zv * np.conj(w)) ** 2)

    return _per_point(z, _one)


def berezin_direct(rule: DiskQuadrature, f: Integrand, z):
    """f̃(z) = ∫ f(w)|k_z(w)|² dλ(w)"""
    arr = check_points(z)
    if np.any(np.abs(arr) > BEREZIN_GRADING_RADIUS) and not rule.graded:
        logger.warning(
            "Berezin transform at |z| > %.2f on a rule without boundary grading; the kernel peak may be under-resolved",
            BEREZIN_GRADING_RADIUS,
        )
    values = evaluate_nodes(rule, f)
    w = rule.points

    def _one(zv: complex) -> complex:
        kz2 = (1.0 - abs(zv) ** 2) ** 2 / np.abs(1.0 - zv.conjugate() * w) ** 4
        return integrate_values(rule, values * kz2)

    return _per_point(arr, _one)


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon}")


def operator_s(rule: DiskQuadrature, fn: Integrand, z: complex, epsilon: float) -> float:
    """(Sf)(z) = ∫|f(v)|(1-|z|²)⁻¹(1-|v|²)⁻¹(1-|φ_z(v)|²)^(1-2ε) dλ(v)

    1-|φ_z(v)|² = (1-|z|²)(1-|v|²)/|1-z̄v|² を代入した形
    ((1-|z|²)(1-|v|²))^(-2ε) / |1-z̄v|^(2-4ε) で評価する。
    """
    _check_epsilon(epsilon)
    z = complex(check_points(z))
    x = abs(z) ** 2

    def _integrand(v, gap):
        weight = ((1.0 - x) * gap) ** (-2.0 * epsilon) / np.abs(1.0 - z.conjugate() * v) ** (2.0 - 4.0 * epsilon)
        return np.abs(fn(v, gap)) * weight

    return max(integrate(rule, _integrand).real, 0.0)


def lemma3_ratio(
    rule: DiskQuadrature,
    fn: Integrand,
    z: complex,
    epsilon: float,
    p: float,
    normalization: str = "epsilon",
    norm_rule: Optional[DiskQuadrature] = None,
) -> float:
    """Sf(z) / ((K_z(z))^ε ‖f‖_p)

    normalization="two-epsilon" のときは (K_z(z))^(2ε) で割る。
    ‖f‖_p は norm_rule（省略時は rule）で計算する。
    """
    if not p > 1.0:
        raise DomainError(f"Lemma 3 needs p > 1, got {p}")
    p_conj = p / (p - 1.0)
    if not 0.0 < epsilon < 1.0 / (2.0 * p_conj):
        raise DomainError(f"epsilon out of admissible range: need 0 < epsilon < 1/(2p') = {1.0 / (2.0 * p_conj):.6g}")
    power = {"epsilon": epsilon, "two-epsilon": 2.0 * epsilon}.get(normalization)
    if power is None:
        raise DomainError(f"unknown normalization '{normalization}'")
    s_value = operator_s(rule, fn, z, epsilon)
    norm = lp_norm(norm_rule or rule, fn, p)
    if norm == 0.0:
        if s_value == 0.0:
            return 0.0
        raise NumericalError("Lemma 3 ratio undefined: ||f||_p = 0 but Sf(z) != 0")
    k_zz = (1.0 - abs(complex(z)) ** 2) ** -2
    return s_value / (k_zz ** power * norm)


# ---------------------------------------------------------------------------
# Schur 積分（(T_f K_u)(v) は行列から再構成する）
# ---------------------------------------------------------------------------

def kernel_basis_coefficients(u: complex, order: int) -> np.ndarray:
    """K_u = Σ_m √(m+1) ū^m e_m の係数"""
    m = np.arange(order)
    return np.sqrt(m + 1.0) * np.power(complex(u).conjugate(), m)


def _row_values(entries: np.ndarray, u: complex, rule: DiskQuadrature) -> np.ndarray:
    """v ↦ (T_f K_u)(v) をノード上で評価"""
    n = entries.shape[0]
    b = entries @ kernel_basis_coefficients(u, n)
    return evaluate_power_series(rule, np.sqrt(np.arange(n) + 1.0) * b)


def _col_values(entries: np.ndarray, v: complex, rule: DiskQuadrature) -> np.ndarray:
    """u ↦ (T_f K_u)(v) をノード上で評価

    (T_f K_u)(v) = Σ_m √(m+1) ū^m d_m、d = Aᵀ(√(n+1) vⁿ)。u の多項式の共役として評価する。
    """
    n = entries.shape[0]
    root = np.sqrt(np.arange(n) + 1.0)
    d = entries.T @ (root * np.power(complex(v), np.arange(n)))
    return np.conj(evaluate_power_series(rule, np.conj(root * d)))


def _weighted_integral(rule: DiskQuadrature, values: np.ndarray, weight: SchurWeightSpec) -> float:
    measure = rule.gaps ** weight.measure_exponent()
    return max(integrate_values(rule, np.abs(values) * measure).real, 0.0)


def _with_refinement(compute, matrix, refined, label: str) -> float:
    value = compute(matrix.entries)
    if refined is not None:
        check = compute(refined.entries)
        scale = max(abs(check), 1e-300)
        if abs(check - value) > KERNEL_REFINE_REL * scale:
            raise KernelTruncationError(
                f"kernel truncation too coarse for {label}: N={matrix.order} gives {value:.6g}, "
                f"N={refined.order} gives {check:.6g}"
            )
    return value


def schur_row_integral(matrix, u: complex, weight: SchurWeightSpec, rule: DiskQuadrature, refined=None) -> float:
    """∫|(T_f K_u)(v)| g(v)-重み dλ(v)（被積分重みは (1-|v|²)^(-2ε)）

    refined に次数 N+16 の行列を渡すと、結果が 1% 超変わる場合に KernelTruncationError。
    """
    u = complex(check_points(u, "u"))
    return _with_refinement(
        lambda a: _weighted_integral(rule, _row_values(a, u, rule), weight), matrix, refined, f"row u={u}"
    )


def schur_col_integral(matrix, v: complex, weight: SchurWeightSpec, rule: DiskQuadrature, refined=None) -> float:
    """∫|(T_f K_u)(v)| g(u)-重み dλ(u)"""
    v = complex(check_points(v, "v"))
    return _with_refinement(
        lambda a: _weighted_integral(rule, _col_values(a, v, rule), weight), matrix, refined, f"column v={v}"
    )


def schur_normalizer(point: complex, weight: SchurWeightSpec) -> float:
    """経験的 Schur 定数 c = 積分 / (K_z(z))^ε の分母"""
    return (1.0 - abs(complex(point)) ** 2) ** (-2.0 * weight.epsilon)

