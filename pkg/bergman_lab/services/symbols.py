"""シンボル（単位円板上の複素数値関数）と組み込みシンボル、動径シンボルの固有値"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from bergman_lab.config import Settings, settings as default_settings
from bergman_lab.errors import ConfigError, DomainError, NonIntegrableSymbolError
from bergman_lab.services import expression as ex
from bergman_lab.services.quadrature import build_rule, radial_powers

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Symbol:
    """評価可能なシンボル f と、そのフラグ

    source は builtin / expression / derived のいずれか。
    呼び出しは f(w, gap)。gap を省略すると 1-|w|² を計算する。
    """
    id: str
    evaluator: Evaluator = field(repr=False)
    radial: bool = False
    real_valued: bool = False
    bounded: bool = False
    boundary_singular: bool = False
    non_integrable: bool = False
    bound: Optional[float] = None
    breakpoints: tuple[float, ...] = ()
    source: str = "derived"
    text: str = ""

    def __call__(self, w, gap=None):
        scalar = np.ndim(w) == 0
        w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
        if gap is None:
            gap_arr = 1.0 - np.abs(w_arr) ** 2
        else:
            gap_arr = np.broadcast_to(np.asarray(gap, dtype=float), w_arr.shape)
        out = np.broadcast_to(np.asarray(self.evaluator(w_arr, gap_arr), dtype=complex), w_arr.shape)
        return complex(out[0]) if scalar else out

    def flags(self) -> dict:
        return {
            "radial": self.radial,
            "realValued": self.real_valued,
            "bounded": self.bounded,
            "boundarySingular": self.boundary_singular,
        }

    def conjugate(self) -> "Symbol":
        """f̄"""
        base = self.evaluator
        return replace(self, id=f"conj({self.id})", evaluator=lambda w, gap: np.conj(base(w, gap)), source="derived")

    def scaled(self, c: complex) -> "Symbol":
        """c·f"""
        base = self.evaluator
        c = complex(c)
        real = self.real_valued and c.imag == 0.0
        return replace(
            self,
            id=f"({c!r})*({self.id})",
            evaluator=lambda w, gap: c * base(w, gap),
            real_valued=real,
            bound=None if self.bound is None else abs(c) * self.bound,
            source="derived",
        )

    def __add__(self, other: "Symbol") -> "Symbol":
        a, b = self.evaluator, other.evaluator
        bounded = self.bounded and other.bounded
        return Symbol(
            id=f"({self.id})+({other.id})",
            evaluator=lambda w, gap: a(w, gap) + b(w, gap),
            radial=self.radial and other.radial,
            real_valued=self.real_valued and other.real_valued,
            bounded=bounded,
            boundary_singular=self.boundary_singular or other.boundary_singular,
            non_integrable=self.non_integrable or other.non_integrable,
            bound=(self.bound + other.bound) if bounded else None,
            breakpoints=tuple(sorted(set(self.breakpoints) | set(other.breakpoints))),
        )

    def compose_mobius(self, z: complex) -> "Symbol":
        """f∘φ_z（境界距離は (1-|z|²)(1-|w|²)/|1-z̄w|² で正確に渡す）"""
        z = complex(z)
        if abs(z) >= 1.0:
            raise DomainError(f"composition point {z} is not inside the unit disk")
        base = self.evaluator
        zc = z.conjugate()
        x = abs(z) ** 2

        def _composed(w, gap):
            denom = 1.0 - zc * w
            return base((z - w) / denom, (1.0 - x) * gap / np.abs(denom) ** 2)

        return replace(
            self,
            id=f"({self.id})o phi[{z.real:.17g}{z.imag:+.17g}i]",
            evaluator=_composed,
            radial=self.radial and z == 0,
            breakpoints=self.breakpoints if z == 0 else (),
            source="derived",
        )

    def ensure_integrable(self) -> None:
        if self.non_integrable:
            raise NonIntegrableSymbolError(f"symbol '{self.id}' is not in L1 of the disk")


def symbol_from_expression(text: str, id: Optional[str] = None, **overrides) -> Symbol:
    """式文字列からシンボルを作る（フラグは静的解析、overrides で上書き）"""
    node = ex.parse_expression(text)
    flags = ex.analyze(node)
    fields = dict(
        radial=flags.radial,
        real_valued=flags.real_valued,
        bounded=flags.bounded,
        boundary_singular=flags.boundary_singular,
        non_integrable=flags.non_integrable,
        bound=flags.bound,
        breakpoints=flags.breakpoints,
    )
    fields.update(overrides)
    return Symbol(
        id=id or text,
        evaluator=lambda w, gap: ex.evaluate(node, w, gap),
        source="expression",
        text=text,
        **fields,
    )


# ---------------------------------------------------------------------------
# 組み込みシンボル（name:param）
# ---------------------------------------------------------------------------

def _nonneg_int(name: str, param: str) -> int:
    try:
        k = int(param)
    except ValueError as e:
        raise ConfigError(f"{name} needs an integer parameter, got '{param}'") from e
    if k < 0:
        raise ConfigError(f"{name} needs a nonnegative integer, got {k}")
    return k


def _real_param(name: str, param: str) -> float:
    try:
        v = float(param)
    except ValueError as e:
        raise ConfigError(f"{name} needs a real parameter, got '{param}'") from e
    if not math.isfinite(v):
        raise ConfigError(f"{name} parameter must be finite")
    return v


def _const_text(param: str) -> str:
    c = _real_param("const", param)
    return repr(c) if c >= 0 else f"-{abs(c)!r}"


def _disk_text(param: str) -> str:
    r = _real_param("disk", param)
    if not 0.0 < r <= 1.0:
        raise ConfigError(f"disk radius must lie in (0, 1], got {r}")
    return f"disk({r!r})"


def _boundary_text(param: str) -> str:
    a = _real_param("boundary", param)
    if not 0.0 < a < 1.0:
        raise ConfigError(f"boundary exponent must lie in (0, 1), got {a}")
    return f"(1-abs(w)^2)^(-{a!r})"


# name → (式テンプレート生成関数, 既定パラメータ, 断定するフラグ)
_BUILTINS: dict[str, tuple[Callable[[str], str], Optional[str], dict]] = {
    "const": (_const_text, "1", {}),
    "monomial": (lambda p: f"w^{_nonneg_int('monomial', p)}", "1", {}),
    "conjmonomial": (lambda p: f"conj(w)^{_nonneg_int('conjmonomial', p)}", "1", {}),
    "disk": (_disk_text, "0.5", {"bounded": True, "bound": 1.0}),
    "abs2": (lambda p: "abs(w)^2", None, {}),
    "boundary": (_boundary_text, "0.75", {"bounded": False, "boundary_singular": True}),
    "oscillator": (lambda p: f"exp(i*{_nonneg_int('oscillator', p)}*arg(w))*abs(w)", "1", {"bounded": True, "bound": 1.0}),
}

BUILTIN_NAMES: tuple[str, ...] = tuple(_BUILTINS)


def builtin_symbol(name: str, param: Optional[str] = None) -> Symbol:
    """組み込みシンボル（例: disk:0.5, boundary:0.75, oscillator:2）"""
    if name not in _BUILTINS:
        raise ConfigError(f"unknown built-in symbol '{name}'")
    template, default, asserted = _BUILTINS[name]
    if param is None:
        param = default
    text = template(param) if param is not None else template("")
    sid = name if param is None else f"{name}:{param}"
    sym = symbol_from_expression(text, id=sid, **asserted)
    return replace(sym, source="builtin")


def resolve_symbol(spec: str) -> Symbol:
    """CLI の --symbol 値を解決する（組み込み名 → 式の順）"""
    spec = spec.strip()
    name, _, param = spec.partition(":")
    if name in _BUILTINS and (param or ":" not in spec):
        return builtin_symbol(name, param or None)
    return symbol_from_expression(spec)


def default_builtins() -> list[Symbol]:
    """テストと検証スイートで使う組み込みシンボルの代表"""
    return [
        builtin_symbol("const", "1"),
        builtin_symbol("const", "-2.5"),
        builtin_symbol("monomial", "1"),
        builtin_symbol("monomial", "3"),
        builtin_symbol("conjmonomial", "2"),
        builtin_symbol("disk", "0.5"),
        builtin_symbol("abs2"),
        builtin_symbol("boundary", "0.75"),
        builtin_symbol("oscillator", "2"),
    ]


# ---------------------------------------------------------------------------
# 動径シンボルの固有値
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialEigenvalues:
    """γ_n = (n+1)∫₀¹ g(√t) tⁿ dt（動径シンボルの対角テープリッツ行列）"""
    order: int
    gamma: np.ndarray = field(repr=False)
    symbol_id: str = ""


def radial_eigenvalues(
    symbol: Symbol,
    order: int,
    n_radial: Optional[int] = None,
    cfg: Optional[Settings] = None,
) -> RadialEigenvalues:
    """1 次元求積で γ_n を計算（境界特異なら幾何分割パネル）"""
    cfg = cfg or default_settings
    if not symbol.radial:
        raise DomainError(f"symbol '{symbol.id}' is not radial")
    symbol.ensure_integrable()
    rule = build_rule(
        n_radial=n_radial or max(cfg.quad_radial, math.ceil(order / 2) + 1),
        n_angular=1,
        graded_panels=cfg.graded_panels if symbol.boundary_singular else 0,
        breakpoints=symbol.breakpoints,
    )
    g = symbol(rule.radii.astype(complex), rule.gap)
    if not np.all(np.isfinite(g)):
        raise NonIntegrableSymbolError(f"symbol '{symbol.id}' is not finite on the radial nodes")
    # (n+1) Σ_i w_i g_i t_iⁿ、t_iⁿ = exp(n log t_i)
    powers = radial_powers(rule, 2 * order)[:, 0::2]
    gamma = (np.arange(order) + 1.0) * np.sum(rule.radial_weights[:, None] * g[:, None] * powers, axis=0)
    if symbol.real_valued:
        gamma = gamma.real
    return RadialEigenvalues(order=order, gamma=gamma, symbol_id=symbol.id)
