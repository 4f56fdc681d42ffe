"""メビウス変換・ベルグマン核・双曲距離"""

import math

import numpy as np
import pytest

from bergman_lab.errors import DomainError
from bergman_lab.services.geometry import (
    HyperbolicDiskSpec,
    bergman_distance,
    bergman_kernel,
    disk_center_from_gap,
    disk_radius_from_gap,
    euclidean_disk,
    grid_points,
    hyperbolic_to_euclidean,
    mobius,
    mobius_gap,
    normalized_kernel,
    random_disk_points,
    unitary_apply,
)


class TestMobius:
    def test_involution(self, rng):
        z = random_disk_points(rng, 50, 0.9)
        w = random_disk_points(rng, 50, 0.9)
        np.testing.assert_allclose(mobius(z, mobius(z, w)), w, atol=1e-12)

    def test_swaps_point_and_origin(self):
        z = 0.3 - 0.4j
        assert mobius(z, 0.0) == pytest.approx(z, abs=1e-15)
        assert abs(mobius(z, z)) < 1e-15

    def test_scalar_in_scalar_out(self):
        assert isinstance(mobius(0.5, 0.25j), complex)

    def test_gap_identity(self, rng):
        z = random_disk_points(rng, 30, 0.95)
        w = random_disk_points(rng, 30, 0.95)
        direct = 1.0 - np.abs(mobius(z, w)) ** 2
        np.testing.assert_allclose(mobius_gap(z, w), direct, rtol=1e-10)

    def test_rejects_boundary_points(self):
        with pytest.raises(DomainError):
            mobius(1.0, 0.0)
        with pytest.raises(DomainError):
            mobius(0.0, complex(0.6, 0.8))


class TestKernels:
    def test_kernel_at_origin(self):
        assert bergman_kernel(0.0, 0.7j) == pytest.approx(1.0)

    def test_normalized_kernel_on_diagonal(self):
        z = 0.6
        assert normalized_kernel(z, z) == pytest.approx(1.0 / (1.0 - z * z))

    def test_unitary_of_one_is_minus_kernel(self, rng):
        z = 0.4 + 0.3j
        w = random_disk_points(rng, 20, 0.9)
        lhs = unitary_apply(z, lambda u: np.ones_like(u), w)
        np.testing.assert_allclose(lhs, -normalized_kernel(z, w), atol=1e-12)


class TestBergmanDistance:
    def test_half_log_three(self):
        assert bergman_distance(0.0, 0.5) == pytest.approx(0.5 * math.log(3.0), abs=1e-14)

    def test_radial_distance_is_artanh(self):
        assert bergman_distance(0.0, math.tanh(0.7)) == pytest.approx(0.7, abs=1e-13)

    def test_symmetry_and_invariance(self, rng):
        z = random_disk_points(rng, 20, 0.5)
        w = random_disk_points(rng, 20, 0.5)
        a = 0.2 - 0.3j
        d = bergman_distance(z, w)
        np.testing.assert_allclose(bergman_distance(w, z), d, rtol=1e-12)
        np.testing.assert_allclose(bergman_distance(mobius(a, z), mobius(a, w)), d, rtol=1e-10, atol=1e-14)


class TestHyperbolicDisk:
    def test_centered_disk(self):
        disk = euclidean_disk(0.0, 0.4)
        assert disk.center == 0.0
        assert disk.radius == pytest.approx(0.4)

    def test_boundary_maps_to_pseudo_radius(self):
        z, s = 0.5 + 0.2j, 0.3
        disk = euclidean_disk(z, s)
        theta = np.linspace(0.0, 2.0 * np.pi, 17)
        rim = disk.center + disk.radius * np.exp(1j * theta)
        np.testing.assert_allclose(np.abs(mobius(z, rim)), s, rtol=1e-12)

    def test_hyperbolic_radius_uses_tanh(self):
        spec = HyperbolicDiskSpec(center=0.0, delta=0.25)
        assert hyperbolic_to_euclidean(spec).radius == pytest.approx(math.tanh(0.25))

    def test_gap_form_matches(self):
        z, s = 0.9 * np.exp(0.3j), math.tanh(0.25)
        disk = euclidean_disk(z, s)
        gap = 1.0 - abs(z) ** 2
        assert disk_radius_from_gap(gap, s) == pytest.approx(disk.radius, rel=1e-13)
        assert disk_center_from_gap(z, gap, s) == pytest.approx(disk.center, rel=1e-13)

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(DomainError):
            HyperbolicDiskSpec(center=0.0, delta=0.0)


def test_grid_points_order():
    points = grid_points([0.0, 0.5], 4)
    assert len(points) == 8
    assert [p[0] for p in points] == [0.0] * 4 + [0.5] * 4
    assert points[5][2] == pytest.approx(0.5j)
