"""単位円板上の求積"""

import math

import numpy as np
import pytest

from bergman_lab.errors import DomainError, InsufficientResolutionError, NonFiniteIntegrandError
from bergman_lab.services.quadrature import (
    annulus,
    build_rule,
    evaluate_power_series,
    integrate,
    lp_norm,
    monomial_moments,
    peak_angular_count,
    peak_panels,
    restrict,
    rule_for_symbol,
    symbol_peak_rule,
)
from bergman_lab.services.symbols import builtin_symbol


def _one(w, gap):
    return np.ones_like(w)


class TestBuildRule:
    def test_weights_sum_to_area(self, rule):
        assert math.fsum(rule.weights) == pytest.approx(1.0, abs=1e-13)
        assert np.all(rule.weights > 0.0)

    def test_graded_weights_sum_to_area(self, graded_rule):
        assert math.fsum(graded_rule.weights) == pytest.approx(1.0, abs=1e-13)

    def test_nodes_inside_disk(self, graded_rule):
        # t は 1.0 に丸まることがあるが、gap は常に正
        assert np.all(graded_rule.gap > 0.0)
        assert np.all(graded_rule.t <= 1.0)

    @pytest.mark.parametrize("n_radial, panels", [(64, 24), (32, 12), (16, 30)])
    def test_deep_grading_builds(self, n_radial, panels):
        rule = build_rule(n_radial, 1, graded_panels=panels)
        assert rule.gap.min() > 0.0
        assert math.fsum(rule.weights) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("alpha, expected", [(0.25, 4.0 / 3.0), (0.75, 4.0)])
    def test_deep_grading_integrates_boundary_power(self, alpha, expected):
        rule = build_rule(64, 1, graded_panels=24)
        value = integrate(rule, lambda w, gap: gap ** -alpha)
        assert value.real == pytest.approx(expected, rel=1e-10)

    def test_gap_is_exact_near_boundary(self, graded_rule):
        # 最後のパネルの境界距離は 2^-24 より小さい
        assert graded_rule.gap.min() < 2.0 ** -24
        np.testing.assert_allclose(1.0 - graded_rule.t, graded_rule.gap, atol=1e-15)

    def test_rejects_bad_sizes(self):
        with pytest.raises(DomainError):
            build_rule(0, 8)
        with pytest.raises(DomainError):
            build_rule(8, 8, breakpoints=(1.5,))

    def test_fingerprint_is_deterministic(self):
        assert build_rule(16, 32).fingerprint == build_rule(16, 32).fingerprint
        assert build_rule(16, 32).fingerprint != build_rule(16, 64).fingerprint

    def test_declared_degree(self):
        assert build_rule(32, 128).declared_degree == 126
        assert build_rule(8, 128).declared_degree == 30


class TestIntegrate:
    @pytest.mark.parametrize("k", [0, 1, 5, 20])
    def test_radial_monomials(self, rule, k):
        value = integrate(rule, lambda w, gap: np.abs(w) ** (2 * k))
        assert value.real == pytest.approx(1.0 / (k + 1), rel=1e-13)

    def test_non_diagonal_monomials_vanish(self, rule):
        assert abs(integrate(rule, lambda w, gap: w ** 3 * np.conj(w))) < 1e-15

    @pytest.mark.parametrize("alpha, expected", [(0.25, 4.0 / 3.0), (0.5, 2.0), (0.75, 4.0)])
    def test_boundary_singular(self, graded_rule, alpha, expected):
        value = integrate(graded_rule, lambda w, gap: gap ** -alpha)
        assert value.real == pytest.approx(expected, rel=1e-9)

    def test_non_finite_names_node(self, rule):
        def bad(w, gap):
            out = np.ones_like(w)
            out[7] = np.inf
            return out

        with pytest.raises(NonFiniteIntegrandError) as info:
            integrate(rule, bad)
        assert info.value.index == 7

    def test_lp_norm(self, rule):
        assert lp_norm(rule, lambda w, gap: 2.0 * np.ones_like(w), 3.0) == pytest.approx(2.0)
        assert lp_norm(rule, lambda w, gap: w, 2.0) == pytest.approx(math.sqrt(0.5))
        with pytest.raises(DomainError):
            lp_norm(rule, _one, 0.5)


class TestRestrict:
    def test_area_of_subdisk(self):
        r = 0.7
        sub = restrict(build_rule(32, 64, breakpoints=(r * r,)), r)
        assert integrate(sub, _one).real == pytest.approx(r * r, rel=1e-14)
        assert np.all(np.abs(sub.points) < r)

    def test_requires_breakpoint(self, rule):
        with pytest.raises(DomainError):
            restrict(rule, 0.5)


class TestAnnulus:
    def test_area_outside_subdisk(self):
        r = 0.7
        outer = annulus(build_rule(32, 64, graded_panels=24, breakpoints=(r * r,)), r)
        assert integrate(outer, _one).real == pytest.approx(1.0 - r * r, rel=1e-13)
        assert np.all(outer.t > r * r)
        assert outer.graded

    def test_pieces_add_up(self):
        r = 0.9
        full = build_rule(32, 16, graded_panels=24, breakpoints=(r * r,))
        inner, outer = restrict(full, r), annulus(full, r)
        assert inner.size + outer.size == full.size

    def test_requires_breakpoint(self, rule):
        with pytest.raises(DomainError):
            annulus(rule, 0.5)


class TestMoments:
    def test_identity_moments(self, rule):
        n = 32
        moments = monomial_moments(rule, _one, n).entries
        np.testing.assert_allclose(moments, np.diag(1.0 / (np.arange(n) + 1.0)), atol=1e-14)

    def test_shift_moments(self, rule):
        # ∫ w·wᵃw̄ᵇ = 1/(a+2) when b = a+1
        moments = monomial_moments(rule, lambda w, gap: w, 8).entries
        for a in range(7):
            assert moments[a, a + 1] == pytest.approx(1.0 / (a + 2), rel=1e-13)
        assert abs(moments[3, 3]) < 1e-15

    def test_insufficient_angular_resolution(self):
        with pytest.raises(InsufficientResolutionError):
            monomial_moments(build_rule(16, 8), _one, 6)


class TestPowerSeries:
    def test_matches_direct_evaluation(self, rule):
        coeffs = np.array([1.0, -2.0j, 0.5, 0.0, 3.0 + 1.0j])
        direct = sum(c * rule.points ** n for n, c in enumerate(coeffs))
        np.testing.assert_allclose(evaluate_power_series(rule, coeffs), direct, atol=1e-13)


class TestRuleSizing:
    def test_rule_for_symbol_resolves_order(self, cfg):
        rule = rule_for_symbol(builtin_symbol("abs2"), 100, cfg)
        assert rule.n_angular >= 200
        assert rule.n_radial >= 50
        assert not rule.graded

    def test_rule_for_singular_symbol_is_graded(self, cfg):
        assert rule_for_symbol(builtin_symbol("boundary", "0.5"), 8, cfg).graded

    def test_rule_for_disk_has_breakpoint(self, cfg):
        assert rule_for_symbol(builtin_symbol("disk", "0.5"), 8, cfg).breakpoints == (0.25,)

    def test_peak_sizes(self):
        assert peak_angular_count(0.5) == 256
        assert peak_angular_count(0.99) == 4096
        assert peak_panels(0.99, 24) == 15
        assert peak_panels(0.999999, 24) == 24

    def test_symbol_peak_rule(self, cfg):
        smooth = symbol_peak_rule(builtin_symbol("const", "1"), 0.99, cfg)
        assert smooth.n_angular == 4096
        assert smooth.graded_panels == 15
        singular = symbol_peak_rule(builtin_symbol("boundary", "0.5"), 0.3, cfg)
        assert singular.graded_panels == cfg.graded_panels
        assert symbol_peak_rule(builtin_symbol("disk", "0.5"), 0.3, cfg).breakpoints == (0.25,)
