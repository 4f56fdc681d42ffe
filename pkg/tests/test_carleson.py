"""Luecking の埋め込み判定"""

import math

import numpy as np
import pytest

from bergman_lab.constants import VERDICT_EMBEDDING_FAILS, VERDICT_EMBEDDING_HOLDS, VERDICT_INCONCLUSIVE
from bergman_lab.errors import ConfigError, DomainError
from bergman_lab.models import EmbeddingQuery
from bergman_lab.services.carleson import (
    MeasureSpec,
    area_measure,
    decide,
    embedding_check,
    k_function,
    ks_integral,
    ks_norm,
    local_rule,
    parse_atoms,
)
from bergman_lab.services.geometry import random_disk_points
from bergman_lab.services.symbols import builtin_symbol

QUERY = EmbeddingQuery(p=2.0, q=1.0, delta=0.25)


class TestMeasureSpec:
    def test_parse_atoms(self):
        mu = parse_atoms("0.5,0,1; 0,-0.25,0.5")
        assert mu.kind == "atoms"
        assert mu.atoms == ((0.5 + 0j, 1.0), (-0.25j, 0.5))

    @pytest.mark.parametrize("text", ["0.5,0", "a,b,c", "0.1,0.1,-1", ""])
    def test_rejects_malformed_atoms(self, text):
        with pytest.raises(ConfigError):
            parse_atoms(text)

    def test_rejects_atom_outside_disk(self):
        with pytest.raises(DomainError):
            parse_atoms("1.0,0,1")

    def test_density_needs_symbol(self):
        with pytest.raises(ConfigError):
            MeasureSpec(kind="density")

    def test_label(self):
        assert area_measure(2.0).label == "const:2.0"
        assert parse_atoms("0,0,1").label.startswith("atoms[")


class TestKFunction:
    @pytest.mark.parametrize("scale", [1.0, 2.5])
    def test_scaled_area_measure(self, rng, scale):
        points = random_disk_points(rng, 10, 0.99)
        np.testing.assert_allclose(k_function(area_measure(scale), points, 0.25), scale, rtol=1e-12)

    def test_single_atom_at_center(self):
        s = math.tanh(0.25)
        assert k_function(parse_atoms("0,0,1"), 0.0, 0.25) == pytest.approx(1.0 / s ** 2)

    def test_atom_outside_hyperbolic_disk(self):
        assert k_function(parse_atoms("0.9,0,1"), 0.0, 0.25) == 0.0

    def test_local_rule_refinement(self):
        mu = MeasureSpec(kind="density", density=builtin_symbol("boundary", "0.5"))
        coarse = k_function(mu, 0.0, 0.25)
        fine = k_function(mu, 0.0, 0.25, local_rule(32, 64))
        assert coarse == pytest.approx(fine, rel=1e-8)

    def test_negative_density(self):
        mu = MeasureSpec(kind="density", density=builtin_symbol("const", "-1"))
        with pytest.raises(DomainError):
            k_function(mu, 0.2, 0.25)

    def test_delta_range(self):
        with pytest.raises(DomainError):
            k_function(area_measure(), 0.0, 0.5)


class TestNorms:
    def test_ks_integral_of_one(self):
        x = np.arange(50) * 0.125
        gaps = 1.0 / np.cosh(x) ** 2
        assert ks_integral(np.ones_like(gaps), gaps) == pytest.approx(1.0, abs=1e-15)

    def test_area_norm_is_one(self):
        row = ks_norm(area_measure(), QUERY, 0, angles=4, threads=1)
        assert row["norm"] == pytest.approx(1.0, abs=1e-12)
        assert row["h"] == 0.125
        assert row["H"] == 6.0
        assert row["radii"] == 49

    def test_levels_refine(self):
        row = ks_norm(area_measure(), QUERY, 1, angles=2, threads=1)
        assert row["h"] == 0.0625
        assert row["radii"] == 193


class TestDecide:
    def test_holds(self):
        assert decide([1.0, 1.05, 1.1, 1.12]) == VERDICT_EMBEDDING_HOLDS

    def test_fails(self):
        assert decide([1.0, 2.0, 4.0, 8.0]) == VERDICT_EMBEDDING_FAILS

    def test_inconclusive(self):
        assert decide([1.0, 1.5, 1.2]) == VERDICT_INCONCLUSIVE
        assert decide([1.0, 1.0]) == VERDICT_INCONCLUSIVE


class TestEmbeddingCheck:
    def test_area_measure_holds(self):
        report = embedding_check(area_measure(3.0), QUERY, levels=3, angles=4, threads=1)
        assert report.kind == "embedding"
        assert report.summary["verdict"] == VERDICT_EMBEDDING_HOLDS
        assert report.summary["norm"] == pytest.approx(3.0, rel=1e-12)
        assert report.parameters["s"] == pytest.approx(2.0)

    def test_single_atom_holds(self):
        report = embedding_check(parse_atoms("0,0,1"), QUERY, levels=4, angles=8, threads=1)
        assert report.summary["verdict"] == VERDICT_EMBEDDING_HOLDS
