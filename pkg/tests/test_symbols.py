"""シンボル（組み込み・式・派生）と動径シンボルの固有値"""

import numpy as np
import pytest

from bergman_lab.errors import ConfigError, DomainError, NonIntegrableSymbolError
from bergman_lab.services.geometry import mobius, random_disk_points
from bergman_lab.services.symbols import (
    BUILTIN_NAMES,
    builtin_symbol,
    default_builtins,
    radial_eigenvalues,
    resolve_symbol,
    symbol_from_expression,
)


class TestBuiltins:
    def test_registry(self):
        assert set(BUILTIN_NAMES) == {"const", "monomial", "conjmonomial", "disk", "abs2", "boundary", "oscillator"}

    @pytest.mark.parametrize("spec, flags", [
        ("const:2", {"radial": True, "realValued": True, "bounded": True, "boundarySingular": False}),
        ("monomial:3", {"radial": False, "realValued": False, "bounded": True, "boundarySingular": False}),
        ("disk:0.5", {"radial": True, "realValued": True, "bounded": True, "boundarySingular": False}),
        ("boundary:0.75", {"radial": True, "realValued": True, "bounded": False, "boundarySingular": True}),
    ])
    def test_flags(self, spec, flags):
        assert resolve_symbol(spec).flags() == flags

    def test_ids(self):
        assert builtin_symbol("disk", "0.5").id == "disk:0.5"
        assert builtin_symbol("abs2").id == "abs2"

    def test_values(self):
        w = np.array([0.3 + 0.4j, -0.5j])
        np.testing.assert_allclose(resolve_symbol("monomial:3")(w), w ** 3)
        np.testing.assert_allclose(resolve_symbol("conjmonomial:2")(w), np.conj(w) ** 2)
        np.testing.assert_allclose(resolve_symbol("oscillator:2")(w), np.exp(2j * np.angle(w)) * np.abs(w))

    @pytest.mark.parametrize("spec", ["disk:1.5", "boundary:1", "monomial:-1", "const:abc"])
    def test_rejects_bad_parameters(self, spec):
        with pytest.raises(ConfigError):
            resolve_symbol(spec)

    def test_expression_fallback(self):
        f = resolve_symbol("abs(w)^2 + 1")
        assert f.source == "expression"
        assert f(0.5) == pytest.approx(1.25)

    def test_default_builtins_are_integrable(self):
        for f in default_builtins():
            f.ensure_integrable()


class TestDerived:
    def test_conjugate(self):
        f = resolve_symbol("w^2")
        w = np.array([0.2 + 0.7j])
        np.testing.assert_allclose(f.conjugate()(w), np.conj(w) ** 2)

    def test_sum_and_scale(self):
        f = resolve_symbol("abs2") + resolve_symbol("const:1").scaled(3.0)
        np.testing.assert_allclose(f(np.array([0.5])), 3.25)
        assert f.radial

    def test_composition(self, rng):
        z = 0.4 - 0.2j
        f = resolve_symbol("w*conj(w)^2+0.5")
        w = random_disk_points(rng, 10, 0.9)
        np.testing.assert_allclose(f.compose_mobius(z)(w), f(mobius(z, w)), atol=1e-13)

    def test_composition_keeps_boundary_distance(self):
        f = builtin_symbol("boundary", "0.5")
        z, w = 0.6, np.array([0.999999])
        gap = (1.0 - 0.36) * (1.0 - w ** 2) / np.abs(1.0 - z * w) ** 2
        np.testing.assert_allclose(f.compose_mobius(z)(w), gap ** -0.5, rtol=1e-9)

    def test_composition_point_inside_disk(self):
        with pytest.raises(DomainError):
            builtin_symbol("abs2").compose_mobius(1.0)

    def test_non_integrable(self):
        f = symbol_from_expression("(1-abs(w)^2)^(-1.5)")
        with pytest.raises(NonIntegrableSymbolError):
            f.ensure_integrable()


class TestRadialEigenvalues:
    def test_abs2(self, cfg):
        n = np.arange(16)
        gamma = radial_eigenvalues(builtin_symbol("abs2"), 16, cfg=cfg).gamma
        np.testing.assert_allclose(gamma, (n + 1.0) / (n + 2.0), rtol=1e-13)

    def test_disk(self, cfg):
        n = np.arange(16)
        gamma = radial_eigenvalues(builtin_symbol("disk", "0.5"), 16, cfg=cfg).gamma
        np.testing.assert_allclose(gamma, 0.25 ** (n + 1.0), rtol=1e-12)

    def test_boundary_singular(self, cfg):
        gamma = radial_eigenvalues(builtin_symbol("boundary", "0.75"), 4, cfg=cfg).gamma
        assert gamma[0] == pytest.approx(4.0, rel=1e-9)
        assert gamma[1] == pytest.approx(6.4, rel=1e-9)

    def test_rejects_non_radial(self, cfg):
        with pytest.raises(DomainError):
            radial_eigenvalues(builtin_symbol("monomial", "1"), 4, cfg=cfg)
