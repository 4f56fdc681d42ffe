"""CLI コマンドの実装（1 コマンド 1 ハンドラ）

各ハンドラは RunConfig と数値設定を受け取り DiagnosticsReport を返す。
run_command はレポートを書き出して終了コードを返す。判定は終了コードに影響しない。
"""

import logging
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from bergman_lab.config import Settings, settings
from bergman_lab.constants import EXIT_OK, EXIT_SUITE_FAILED
from bergman_lab.errors import ConfigError
from bergman_lab.models import DiagnosticsReport, EmbeddingQuery, RunConfig, SchurWeightSpec
from bergman_lab.services.bergman import berezin_direct
from bergman_lab.services.carleson import MeasureSpec, embedding_check, parse_atoms
from bergman_lab.services.diagnostics import bound_check, compactness_diagnostic, schur_constants
from bergman_lab.services.geometry import grid_points
from bergman_lab.services.quadrature import symbol_peak_rule
from bergman_lab.services.report import emit_matrix_csv, emit_report, matrix_report, versions
from bergman_lab.services.suites import run_suites
from bergman_lab.services.symbols import resolve_symbol
from bergman_lab.services.toeplitz import (
    assemble,
    berezin_at_points,
    hilbert_schmidt_norm,
    kernel_truncation_deficit,
    operator_norm,
    required_kernel_order,
)

logger = logging.getLogger(__name__)

_SCHUR_RADIUS_CAP = 0.95   # Schur 積分を評価する格子の最大半径


def numeric_settings(config: RunConfig) -> Settings:
    """RunConfig の求積パラメータで上書きした Settings"""
    return settings.model_copy(update={
        "quad_radial": config.quad_radial,
        "quad_angular": config.quad_angular,
        "graded_panels": config.graded_panels,
        "default_order": config.n,
        "epsilon": config.epsilon,
        "delta": config.delta,
        "seed": config.seed,
    })


def _verify(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    return run_suites(config.suite, config.seed, cfg)


def _berezin(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    """直接求積と行列の両方でベレジン変換を格子上に並べる（直接求積の則は半径ごと）"""
    f = resolve_symbol(config.symbol)
    f.ensure_integrable()
    matrix = assemble(f, config.n, cfg=cfg)
    rows, rules = [], []
    for rho in config.radii:
        points = grid_points([rho], config.angles)
        zs = np.array([p[2] for p in points], dtype=complex)
        rule = symbol_peak_rule(f, rho, cfg)
        rules.append({"radius": rho, **rule.describe()})
        direct = np.atleast_1d(berezin_direct(rule, f, zs))
        from_matrix = berezin_at_points(matrix, zs)
        deficit = kernel_truncation_deficit(rho, config.n)
        rows.extend(
            {"radius": rho, "angle": j, "re": z.real, "im": z.imag,
             "direct_re": d.real, "direct_im": d.imag, "matrix_re": m.real, "matrix_im": m.imag,
             "difference": abs(d - m), "kernel_deficit": deficit}
            for (_, j, z), d, m in zip(points, direct, from_matrix)
        )
    profile: dict[float, float] = {}
    for row in rows:
        profile[row["radius"]] = max(profile.get(row["radius"], 0.0), abs(complex(row["direct_re"], row["direct_im"])))
    return DiagnosticsReport(
        kind="berezin",
        symbol=f.id,
        parameters={"N": config.n, "flags": f.flags(), "rules": rules},
        grid={"radii": config.radii, "angles": config.angles},
        values=rows,
        summary={
            "profile": [profile[r] for r in sorted(profile)],
            "max_difference": max((r["difference"] for r in rows), default=0.0),
        },
    )


def _matrix(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    f = resolve_symbol(config.symbol)
    matrix = assemble(f, config.n, cfg=cfg)
    return matrix_report(matrix, {"operator_norm": operator_norm(matrix), "hs_norm": hilbert_schmidt_norm(matrix)})


def _bound_check(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    f = resolve_symbol(config.symbol)
    return bound_check(f, config.n, config.radii, config.angles, config.q, cfg, config.threads)


def _compact_check(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    f = resolve_symbol(config.symbol)
    return compactness_diagnostic(f, config.n, config.radii, config.angles, config.r_schedule, cfg)


def _luecking(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    if config.atoms:
        mu = parse_atoms(config.atoms)
    else:
        mu = MeasureSpec(kind="density", density=resolve_symbol(config.symbol))
    query = EmbeddingQuery(p=config.p, q=config.q, delta=config.delta)
    return embedding_check(mu, query, threads=config.threads)


def _schur(config: RunConfig, cfg: Settings) -> DiagnosticsReport:
    f = resolve_symbol(config.symbol)
    radii = [r for r in config.radii if r <= _SCHUR_RADIUS_CAP]
    if len(radii) < len(config.radii):
        logger.warning("schur: radii above %.2f dropped from the grid", _SCHUR_RADIUS_CAP)
    order = max(config.n, required_kernel_order(max(radii, default=0.0)))
    if order != config.n:
        logger.info("schur: matrix order raised from %d to %d for kernel truncation", config.n, order)
    weight = SchurWeightSpec(epsilon=config.epsilon, convention="weight-squared")
    return schur_constants(
        f, order, grid_points(radii, config.angles), weight, cfg, config.threads, r_schedule=config.r_schedule
    )


HANDLERS: dict[str, Callable[[RunConfig, Settings], DiagnosticsReport]] = {
    "verify": _verify,
    "berezin": _berezin,
    "matrix": _matrix,
    "bound-check": _bound_check,
    "compact-check": _compact_check,
    "luecking": _luecking,
    "schur": _schur,
}


def build_report(config: RunConfig) -> DiagnosticsReport:
    """コマンドを実行してレポートを作る（versions を付与）"""
    handler = HANDLERS.get(config.command)
    if handler is None:
        raise ConfigError(f"unknown command '{config.command}'")
    report = handler(config, numeric_settings(config))
    report.versions = versions()
    return report


def _write(payload: bytes, output: Optional[str]) -> None:
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
        logger.info("report written to %s (%d bytes)", path, len(payload))
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def run_command(config: RunConfig) -> int:
    """レポートを書き出し、終了コードを返す（恒等式スイートの失敗のみ 1）"""
    if config.command == "matrix" and config.format == "csv":
        f = resolve_symbol(config.symbol)
        _write(emit_matrix_csv(assemble(f, config.n, cfg=numeric_settings(config))), config.output)
        return EXIT_OK
    report = build_report(config)
    _write(emit_report(report, config.format), config.output)
    if report.kind == "identity-suite" and not report.summary.get("passed", False):
        logger.error("identity suite failed: %d of %d checks", report.summary["failed"], report.summary["checks"])
        return EXIT_SUITE_FAILED
    return EXIT_OK
