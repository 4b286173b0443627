import math

import numpy as np
import pytest

from blobfield.camera import (
    SCENE_CENTER,
    camera_basis,
    camera_position,
    centroid_depth,
    make_camera,
    project,
    ray_for_pixel,
)
from blobfield.errors import BehindCamera, InvalidArgument, OutOfBounds


class TestMakeCamera:
    def test_front_view_position_and_forward(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 256, 256)
        np.testing.assert_allclose(camera_position(cam), [0.5, 0.5, 3.5], atol=1e-15)
        _, _, forward = camera_basis(cam)
        np.testing.assert_allclose(forward, [0.0, 0.0, -1.0], atol=1e-15)

    def test_back_view(self):
        cam = make_camera(math.pi, 0.0, 3.0, 2.5, 256, 256)
        np.testing.assert_allclose(camera_position(cam), [0.5, 0.5, -2.5], atol=1e-12)
        _, _, forward = camera_basis(cam)
        np.testing.assert_allclose(forward, [0.0, 0.0, 1.0], atol=1e-12)

    def test_position_on_orbit_sphere(self):
        cam = make_camera(0.4, 0.2, 3.0, 2.5, 64, 64)
        assert abs(np.linalg.norm(camera_position(cam) - SCENE_CENTER) - 3.0) < 1e-12

    def test_orbit_sphere_many_poses(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            cam = make_camera(rng.uniform(-np.pi, np.pi), rng.uniform(-1.2, 1.2),
                              rng.uniform(0.5, 5.0), 2.5, 8, 8)
            assert abs(np.linalg.norm(camera_position(cam) - SCENE_CENTER)
                       - cam.radius) < 1e-12

    def test_invalid_arguments(self):
        with pytest.raises(InvalidArgument):
            make_camera(radius=0.0)
        with pytest.raises(InvalidArgument):
            make_camera(focal=-1.0)
        with pytest.raises(InvalidArgument):
            make_camera(pitch=math.pi / 2)
        with pytest.raises(InvalidArgument):
            make_camera(width=0)


class TestRays:
    def test_center_pixel_of_odd_grid_is_forward(self):
        cam = make_camera(0.3, -0.2, 3.0, 2.5, 33, 33)
        _, _, forward = camera_basis(cam)
        ray = ray_for_pixel(cam, 16, 16)
        np.testing.assert_allclose(ray.direction, forward, atol=1e-12)

    def test_rays_unit_length(self):
        cam = make_camera(0.7, 0.3, 3.0, 2.5, 16, 16)
        for px, py in [(0, 0), (7, 3), (15, 15)]:
            assert abs(np.linalg.norm(ray_for_pixel(cam, px, py).direction) - 1.0) < 1e-12

    def test_mirrored_pixels_mirror_about_forward_up_plane(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 32, 32)
        right, up, forward = camera_basis(cam)
        left = ray_for_pixel(cam, 3, 11).direction
        mirrored = ray_for_pixel(cam, 28, 11).direction
        assert abs(left @ right + mirrored @ right) < 1e-12
        assert abs(left @ up - mirrored @ up) < 1e-12
        assert abs(left @ forward - mirrored @ forward) < 1e-12

    def test_corner_ray_angle(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 256, 256)
        _, _, forward = camera_basis(cam)
        ray = ray_for_pixel(cam, 0, 0)
        # corner pixel center sits at lateral offset (127.5/128)/focal in both axes
        lateral = (127.5 / 128.0) / 2.5
        expected = math.atan(math.sqrt(2.0) * lateral)
        assert abs(math.acos(np.clip(ray.direction @ forward, -1, 1)) - expected) < 1e-12

    def test_out_of_bounds(self):
        cam = make_camera(width=16, height=16)
        with pytest.raises(OutOfBounds):
            ray_for_pixel(cam, 16, 0)
        with pytest.raises(OutOfBounds):
            ray_for_pixel(cam, 0, -1)


class TestDepthAndProjection:
    def test_scene_center_depth_is_radius(self):
        for yaw, pitch, radius in [(0, 0, 3), (1.1, 0.4, 2.0), (-2.0, -0.7, 4.5)]:
            cam = make_camera(yaw, pitch, radius, 2.5, 64, 64)
            assert abs(centroid_depth(cam, SCENE_CENTER) - radius) < 1e-12

    def test_camera_position_depth_zero(self):
        cam = make_camera(0.5, 0.2, 3.0, 2.5, 64, 64)
        assert abs(centroid_depth(cam, camera_position(cam))) < 1e-12

    def test_depth_affine_along_forward(self):
        # moving along +forward under a front view increases depth; the
        # mirrored move toward the camera lands at radius - 0.25
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 64, 64)
        _, _, forward = camera_basis(cam)
        assert abs(centroid_depth(cam, SCENE_CENTER + 0.25 * forward) - 3.25) < 1e-12
        assert abs(centroid_depth(cam, SCENE_CENTER - 0.25 * forward) - 2.75) < 1e-12

    def test_scene_center_projects_to_image_center(self):
        cam = make_camera(0.9, 0.1, 3.0, 2.5, 256, 128)
        u, v = project(cam, SCENE_CENTER)
        assert abs(u - 128.0) < 1e-9
        assert abs(v - 64.0) < 1e-9

    def test_perspective_division_halves_separation(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 256, 256)
        right, _, forward = camera_basis(cam)
        position = 0.5 * np.ones(3) + np.array([0, 0, 3])
        rho = 0.2
        for z, z2 in [(1.0, 2.0), (1.5, 3.0)]:
            base = position + z * forward
            u1, _ = project(cam, base + rho * right)
            u2, _ = project(cam, base - rho * right)
            far = position + z2 * forward
            u3, _ = project(cam, far + rho * right)
            u4, _ = project(cam, far - rho * right)
            assert abs((u1 - u2) - 2.0 * (u3 - u4)) < 1e-9

    def test_half_separation_pixels(self):
        # (rho / z) * focal * W/2 = (0.2 / 2.0) * 2.5 * 128 = 32
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 256, 256)
        right, _, forward = camera_basis(cam)
        base = camera_position(cam) + 2.0 * forward
        u_off, _ = project(cam, base + 0.2 * right)
        u_mid, _ = project(cam, base)
        assert abs((u_off - u_mid) - 32.0) < 1e-9

    def test_behind_camera(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 64, 64)
        with pytest.raises(BehindCamera):
            project(cam, (0.5, 0.5, 4.5))

    def test_image_y_grows_downward(self):
        # a point above the scene center (world +y) lands in the upper image
        # half, i.e. at smaller v
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 64, 64)
        _, v_up = project(cam, (0.5, 0.7, 0.5))
        _, v_down = project(cam, (0.5, 0.3, 0.5))
        assert v_up < 32.0 < v_down

    def test_project_recovers_pixel_of_ray(self):
        cam = make_camera(0.4, -0.3, 3.0, 2.5, 48, 48)
        rng = np.random.default_rng(3)
        for _ in range(25):
            px = int(rng.integers(0, 48))
            py = int(rng.integers(0, 48))
            ray = ray_for_pixel(cam, px, py)
            t = rng.uniform(0.5, 4.0)
            u, v = project(cam, ray.origin + t * ray.direction)
            assert abs(u - (px + 0.5)) < 1e-6
            assert abs(v - (py + 0.5)) < 1e-6

    def test_foreshortening_product_constant(self):
        cam = make_camera(0.0, 0.0, 3.0, 2.5, 256, 256)
        right, _, forward = camera_basis(cam)
        position = camera_position(cam)
        products = []
        for z in (1.0, 1.7, 2.4, 3.3):
            base = position + z * forward
            u1, _ = project(cam, base + 0.1 * right)
            u2, _ = project(cam, base - 0.1 * right)
            products.append((u1 - u2) * z)
        for p in products[1:]:
            assert abs(p - products[0]) / abs(products[0]) < 1e-9
