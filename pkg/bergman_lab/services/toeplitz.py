"""正規直交基底 e_m = √(m+1)wᵐ でのテープリッツ行列とその演算

A[n][m] = ⟨T_f e_m, e_n⟩ = √((m+1)(n+1)) ∫ f wᵐ w̄ⁿ dλ
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from bergman_lab.config import Settings
from bergman_lab.errors import DomainError, NumericalError, SpectralConvergenceError
from bergman_lab.services.geometry import check_points
from bergman_lab.services.quadrature import (
    DiskQuadrature,
    build_rule,
    monomial_moments,
    restrict,
    rule_for_symbol,
)

logger = logging.getLogger(__name__)

_ORACLE_CHUNK = 256   # 二重求積オラクルで一度に処理する外側ノード数


@dataclass(frozen=True, eq=False)
class ToeplitzMatrix:
    """T_f の N×N 打ち切り"""
    entries: np.ndarray = field(repr=False)
    symbol_id: str = ""
    rule_fingerprint: str = ""

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def adjoint(self) -> "ToeplitzMatrix":
        """T_f* = T_f̄ の行列（共役転置）"""
        return ToeplitzMatrix(self.entries.conj().T.copy(), f"conj({self.symbol_id})", self.rule_fingerprint)


@dataclass(frozen=True)
class KernelCoefficients:
    """k_z の基底係数 (1-|z|²)√(m+1) z̄ᵐ、m < N"""
    z: complex
    order: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def squared_norm(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def assemble(f, order: int, rule: Optional[DiskQuadrature] = None, cfg: Optional[Settings] = None) -> ToeplitzMatrix:
    """A[n][m] = √((m+1)(n+1))·M[m][n]（M は f の単項式モーメント）"""
    if order < 1:
        raise DomainError(f"matrix order must be positive, got {order}")
    if hasattr(f, "ensure_integrable"):
        f.ensure_integrable()
    rule = rule or rule_for_symbol(f, order, cfg)
    moments = monomial_moments(rule, f, order)
    root = np.sqrt(np.arange(order) + 1.0)
    entries = (root[:, None] * root[None, :]) * moments.entries.T
    logger.debug("assembled %dx%d matrix for %s", order, order, getattr(f, "id", "?"))
    return ToeplitzMatrix(entries, getattr(f, "id", ""), rule.fingerprint)


def kernel_coefficients(z: complex, order: int) -> KernelCoefficients:
    """k_z(w) = (1-|z|²) Σ (m+1) z̄ᵐ wᵐ の e_m 係数"""
    z = complex(check_points(z))
    m = np.arange(order)
    coeffs = (1.0 - abs(z) ** 2) * np.sqrt(m + 1.0) * np.power(z.conjugate(), m)
    return KernelCoefficients(z=z, order=order, coeffs=coeffs)


def kernel_truncation_deficit(z: complex, order: int) -> float:
    """1 - ‖k_z の打ち切り‖² = x^N((N+1) - N x)、x = |z|²"""
    x = abs(complex(z)) ** 2
    return x ** order * ((order + 1) - order * x)


def _truncation_warn(z: complex, order: int, label: str) -> None:
    if abs(z) ** 2 > 1.0 - 10.0 / order:
        logger.warning(
            "%s at |z|=%.4g with N=%d: kernel truncation deficit %.3g",
            label, abs(z), order, kernel_truncation_deficit(z, order),
        )


def berezin_from_matrix(matrix: ToeplitzMatrix, z):
    """Ã(z) = ⟨A k_z, k_z⟩ を係数から計算"""
    arr = check_points(z)

    def _one(zv: complex) -> complex:
        _truncation_warn(zv, matrix.order, "matrix Berezin transform")
        c = kernel_coefficients(zv, matrix.order).coeffs
        return complex(np.vdot(c, matrix.entries @ c))

    if arr.ndim == 0:
        return _one(complex(arr))
    return np.array([_one(complex(v)) for v in arr.ravel()]).reshape(arr.shape)


def berezin_at_points(matrix: ToeplitzMatrix, points: np.ndarray, gaps: Optional[np.ndarray] = None) -> np.ndarray:
    """多数の点での Ã（ベクトル化、警告なし）"""
    points = np.asarray(points, dtype=complex)
    gaps = 1.0 - np.abs(points) ** 2 if gaps is None else np.asarray(gaps, dtype=float)
    n = matrix.order
    m = np.arange(n)
    coeffs = gaps[:, None] * np.sqrt(m + 1.0)[None, :] * np.power(np.conj(points)[:, None], m[None, :])
    applied = coeffs @ matrix.entries.T
    return np.sum(np.conj(coeffs) * applied, axis=1)


def truncated_operator(matrix: ToeplitzMatrix, r: float) -> ToeplitzMatrix:
    """T_f^[r] の行列 A·diag(r^(2(m+1)))"""
    if not 0.0 < r < 1.0:
        raise DomainError(f"truncation radius must lie in (0, 1), got {r}")
    scale = np.power(r * r, np.arange(1, matrix.order + 1))
    return ToeplitzMatrix(matrix.entries * scale[None, :], f"{matrix.symbol_id}[r={r!r}]", matrix.rule_fingerprint)


def truncation_remainder(matrix: ToeplitzMatrix, r: float) -> ToeplitzMatrix:
    """A(I - D_r)"""
    if not 0.0 < r < 1.0:
        raise DomainError(f"truncation radius must lie in (0, 1), got {r}")
    scale = -np.expm1(np.arange(1, matrix.order + 1) * 2.0 * math.log(r))
    return ToeplitzMatrix(matrix.entries * scale[None, :], f"{matrix.symbol_id}[1-r={r!r}]", matrix.rule_fingerprint)


def operator_norm(matrix: ToeplitzMatrix) -> float:
    """最大特異値"""
    if not np.all(np.isfinite(matrix.entries)):
        raise NumericalError(f"matrix of '{matrix.symbol_id}' has non-finite entries")
    try:
        singular = scipy.linalg.svd(matrix.entries, compute_uv=False)
    except np.linalg.LinAlgError as e:
        logger.error("SVD failed for %s: %s", matrix.symbol_id, e, exc_info=True)
        raise SpectralConvergenceError(f"singular value decomposition did not converge for '{matrix.symbol_id}'") from e
    return float(singular[0]) if singular.size else 0.0


def hilbert_schmidt_norm(matrix: ToeplitzMatrix) -> float:
    """(Σ|A[n][m]|²)^(1/2)"""
    if not np.all(np.isfinite(matrix.entries)):
        raise NumericalError(f"matrix of '{matrix.symbol_id}' has non-finite entries")
    return float(math.sqrt(math.fsum(np.abs(matrix.entries.ravel()) ** 2)))


def series_at(coeffs: np.ndarray, points) -> np.ndarray:
    """Σ_n cₙ e_n(v) を任意の点で評価（ホーナー法）"""
    coeffs = np.asarray(coeffs, dtype=complex) * np.sqrt(np.arange(len(coeffs)) + 1.0)
    v = np.asarray(points, dtype=complex)
    out = np.zeros_like(v)
    for c in coeffs[::-1]:
        out = out * v + c
    return out


def kernel_apply(matrix: ToeplitzMatrix, u: complex, points) -> np.ndarray:
    """(T_f K_u)(v) = Σ_n e_n(v)·(A c)_n、c_m = √(m+1)ū^m"""
    u = complex(check_points(u, "u"))
    m = np.arange(matrix.order)
    c = np.sqrt(m + 1.0) * np.power(u.conjugate(), m)
    return series_at(matrix.entries @ c, check_points(points, "v"))


def kernel_apply_column(matrix: ToeplitzMatrix, v: complex, points) -> np.ndarray:
    """u ↦ (T_f K_u)(v)、d = Aᵀ(√(n+1) vⁿ) を使って conj(Σ_m e_m(u) conj(d_m)) で評価"""
    v = complex(check_points(v, "v"))
    n = np.arange(matrix.order)
    d = matrix.entries.T @ (np.sqrt(n + 1.0) * np.power(v, n))
    return np.conj(series_at(np.conj(d), check_points(points, "u")))


def required_kernel_order(radius: float, tol: float = 1e-8, start: int = 16) -> int:
    """核係数の尾部 (N+1)·radius^(2N)/(1-radius²) が tol を下回る最小の N（16 の倍数）"""
    if not 0.0 <= radius < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {radius}")
    x = radius * radius
    order = start
    while (order + 1) * x ** order / (1.0 - x) >= tol:
        order += 16
    return order


def project_constant(matrix: ToeplitzMatrix, points) -> np.ndarray:
    """T_f 1 = P(f) を行列の第 0 列から再構成"""
    return series_at(matrix.entries[:, 0], check_points(points, "v"))


def truncation_oracle(
    f,
    order: int,
    r: float,
    inner: Optional[DiskQuadrature] = None,
    outer: Optional[DiskQuadrature] = None,
) -> np.ndarray:
    """T_f^[r] の行列を基底展開を使わずに二重求積で計算する

    B[n][m] = ∫_{rΔ} e_m(u) ∫_Δ f(w) K_u(w) conj(e_n(w)) dλ(w) dλ(u)、K_u(w) = 1/(1-ūw)²
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"truncation radius must lie in (0, 1), got {r}")
    inner = inner or build_rule(48, 128, breakpoints=getattr(f, "breakpoints", ()))
    outer = outer or restrict(build_rule(32, 128, breakpoints=(r * r,)), r)
    w = inner.points
    n = np.arange(order)
    root = np.sqrt(n + 1.0)
    # inner_weights[k, n] = weight_k f(w_k) conj(e_n(w_k))
    f_vals = np.asarray(f(w, inner.gaps), dtype=complex)
    inner_weights = (inner.weights * f_vals)[:, None] * (root[None, :] * np.power(np.conj(w)[:, None], n[None, :]))

    u = outer.points
    result = np.zeros((order, order), dtype=complex)
    for start in range(0, u.size, _ORACLE_CHUNK):
        uc = u[start:start + _ORACLE_CHUNK]
        kernel = 1.0 / (1.0 - np.conj(uc)[:, None] * w[None, :]) ** 2
        g = kernel @ inner_weights                       # (chunk, n)
        e_m = root[None, :] * np.power(uc[:, None], n[None, :])
        result += (g * outer.weights[start:start + _ORACLE_CHUNK, None]).T @ e_m
    return result
