import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blobfield.geometry import (
    blob_covariance,
    density,
    mahalanobis_sq,
    rotation_derivatives,
    rotation_from_euler,
    sigmoid,
)

from conftest import make_blob

angles = st.floats(-math.pi, math.pi, allow_nan=False)


class TestRotation:
    def test_zero_angles_give_identity(self):
        assert np.allclose(rotation_from_euler((0, 0, 0)), np.eye(3), atol=0)

    def test_quarter_turn_about_z(self):
        expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(rotation_from_euler((0, 0, math.pi / 2)),
                                   expected, atol=1e-15)

    def test_orthonormal_and_proper(self):
        r = rotation_from_euler((0.3, 0.5, 0.7))
        np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(r) - 1.0) < 1e-12

    @settings(max_examples=50, deadline=None)
    @given(a=angles, b=angles, c=angles)
    def test_orthonormality_property(self, a, b, c):
        r = rotation_from_euler((a, b, c))
        np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(r) - 1.0) < 1e-12

    def test_derivatives_match_finite_differences(self):
        euler = np.array([0.3, -0.4, 0.9])
        analytic = rotation_derivatives(euler)
        h = 1e-7
        for m in range(3):
            step = np.zeros(3)
            step[m] = h
            numeric = (rotation_from_euler(euler + step)
                       - rotation_from_euler(euler - step)) / (2 * h)
            np.testing.assert_allclose(analytic[m], numeric, atol=1e-7)


class TestCovariance:
    def test_eigenvalues_are_scaled_aspect(self):
        aspect = np.array([0.9, 0.5, 0.3])
        cov = blob_covariance((0.2, 0.4, -0.3), aspect, 0.02)
        np.testing.assert_allclose(cov, cov.T, atol=1e-12)
        eig = np.sort(np.linalg.eigvalsh(cov))
        np.testing.assert_allclose(eig, np.sort(0.02 * aspect), atol=1e-9)


class TestMahalanobis:
    def test_zero_at_center(self):
        assert mahalanobis_sq((0.3, 0.4, 0.5), (0.3, 0.4, 0.5),
                              (0.1, 0.2, 0.3), (0.5, 0.6, 0.7), 0.02) == 0.0

    def test_reduces_to_euclidean(self):
        d = mahalanobis_sq((0.3, 0.0, 0.4), (0.0, 0.0, 0.0),
                           (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 1.0)
        assert abs(d - 0.25) < 1e-15

    def test_rotated_anisotropic_case(self):
        # quarter turn about z maps covariance diag(4,1,1) to diag(1,4,1)
        d = mahalanobis_sq((0.0, 2.0, 0.0), (0.0, 0.0, 0.0),
                           (0.0, 0.0, math.pi / 2), (4.0, 1.0, 1.0), 1.0)
        assert abs(d - 1.0) < 1e-12

    def test_closed_form_matches_explicit_inverse(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            center = rng.uniform(0, 1, 3)
            point = rng.uniform(-1, 2, 3)
            euler = rng.uniform(-np.pi, np.pi, 3)
            aspect = rng.uniform(0.1, 1.0, 3)
            c = rng.uniform(0.005, 0.1)
            fast = mahalanobis_sq(point, center, euler, aspect, c)
            cov = blob_covariance(euler, aspect, c)
            delta = point - center
            explicit = float(delta @ np.linalg.inv(cov) @ delta)
            assert abs(fast - explicit) / max(explicit, 1e-10) < 1e-10


class TestDensity:
    def test_half_at_distance_equal_scale(self):
        # put the query where mahalanobis_sq equals the scale
        blob = make_blob(center=(0.0, 0.0, 0.0), scale=0.25, aspect=(1, 1, 1))
        value = density((0.5, 0.0, 0.0), blob, 1.0)
        assert abs(value - 0.5) < 1e-15

    def test_at_center_is_sigmoid_of_scale(self):
        blob = make_blob(scale=10.0)
        assert abs(density(blob.center, blob, 0.02) - sigmoid(10.0)) < 1e-12
        assert abs(sigmoid(10.0) - 0.9999546021312976) < 1e-12

    def test_logistic_value(self):
        assert abs(sigmoid(-2.0) - 0.11920292202211755) < 1e-15

    def test_inactive_blob_is_exactly_zero(self):
        blob = make_blob(active=False)
        assert density(blob.center, blob, 0.02) == 0.0

    def test_isotropic_rotation_invariance(self):
        rng = np.random.default_rng(7)
        point = np.array([0.6, 0.45, 0.7])
        base = make_blob(aspect=(0.4, 0.4, 0.4), euler=(0, 0, 0))
        reference = density(point, base, 0.02)
        for _ in range(20):
            rotated = make_blob(aspect=(0.4, 0.4, 0.4),
                                euler=rng.uniform(-np.pi, np.pi, 3))
            assert abs(density(point, rotated, 0.02) - reference) < 1e-12

    def test_radial_monotonicity(self):
        blob = make_blob(aspect=(0.8, 0.5, 0.3), euler=(0.2, 0.1, -0.4))
        direction = np.array([0.3, 0.2, 0.9])
        direction /= np.linalg.norm(direction)
        values = [density(blob.center + r * direction, blob, 0.02)
                  for r in np.linspace(0, 0.5, 40)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_scale_monotonicity(self):
        # at a fixed point, density strictly increases with the scale factor
        point = (0.62, 0.5, 0.5)
        values = [density(point, make_blob(scale=s), 0.02) for s in (2.0, 3.0, 4.0, 5.0)]
        assert all(b > a for a, b in zip(values, values[1:]))
