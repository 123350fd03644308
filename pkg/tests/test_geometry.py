"""Geometry: rotations, body-frame angles, delays, Doppler shifts."""

import math

import numpy as np
import pytest

from risloc.errors import ZeroDistance
from risloc.geometry import (SPEED_OF_LIGHT, AnglePair, Pose, direction_angles,
                             doppler_shift, path_delay, rotation_from_euler)


class TestRotationFromEuler:
    def test_zero_angles_give_identity(self):
        np.testing.assert_allclose(rotation_from_euler(0, 0, 0), np.eye(3))

    def test_half_turn_about_z(self):
        r = rotation_from_euler(math.pi, 0, 0)
        np.testing.assert_allclose(r, np.diag([-1.0, -1.0, 1.0]), atol=1e-15)

    def test_quarter_turn_permutes_x_to_y(self):
        r = rotation_from_euler(math.pi / 2, 0, 0)
        np.testing.assert_allclose(r @ [1, 0, 0], [0, 1, 0], atol=1e-15)

    def test_orthonormal_with_positive_determinant(self, rng):
        for _ in range(20):
            yaw, pitch, roll = rng.uniform(-math.pi, math.pi, 3)
            r = rotation_from_euler(yaw, pitch, roll)
            np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-14)
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


class TestDirectionAngles:
    def test_body_x_axis(self):
        ang = direction_angles(Pose(np.zeros(3)), [5.0, 0.0, 0.0])
        assert ang.az == pytest.approx(0.0)
        assert ang.el == pytest.approx(0.0)

    def test_body_z_axis(self):
        ang = direction_angles(Pose(np.zeros(3)), [0.0, 0.0, 2.0])
        assert ang.az == pytest.approx(0.0)
        assert ang.el == pytest.approx(math.pi / 2)

    def test_oblique_target(self):
        # Independent evaluation: u = [1,1,sqrt(2)]/2, az = atan2, el = asin.
        ang = direction_angles(Pose(np.zeros(3)), [1.0, 1.0, math.sqrt(2.0)])
        assert ang.az == pytest.approx(math.pi / 4)
        assert ang.el == pytest.approx(math.pi / 4)

    def test_scale_invariance(self, rng):
        pose = Pose(rng.normal(size=3), rotation_from_euler(0.3, -0.2, 0.9))
        target = pose.position + rng.normal(size=3)
        a1 = direction_angles(pose, target)
        a2 = direction_angles(pose, pose.position + 17.0 * (target - pose.position))
        assert a1.az == pytest.approx(a2.az, abs=1e-12)
        assert a1.el == pytest.approx(a2.el, abs=1e-12)

    def test_rotated_observer(self):
        # A quarter-turn of the observer about z moves a +y target onto body +x.
        pose = Pose(np.zeros(3), rotation_from_euler(math.pi / 2, 0, 0))
        ang = direction_angles(pose, [0.0, 1.0, 0.0])
        assert ang.az == pytest.approx(0.0, abs=1e-12)

    def test_coincident_target_rejected(self):
        with pytest.raises(ZeroDistance):
            direction_angles(Pose([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_angle_ranges(self, rng):
        pose = Pose(np.zeros(3))
        for _ in range(50):
            ang = direction_angles(pose, rng.normal(size=3))
            assert -math.pi < ang.az <= math.pi
            assert -math.pi / 2 <= ang.el <= math.pi / 2


class TestPathDelay:
    def test_unit_propagation_time(self):
        assert path_delay([SPEED_OF_LIGHT, 0, 0], [0, 0, 0]) == pytest.approx(1.0)

    def test_default_satellite_distance(self):
        # Oracle: straight-line range over c plus the clock offset.
        p_s = np.array([-100e3, 100e3, 550e3])
        expected = math.sqrt(100e3**2 + 100e3**2 + 550e3**2) / SPEED_OF_LIGHT + 100e-9
        got = path_delay(p_s, np.zeros(3), 100e-9)
        assert got == pytest.approx(expected, rel=1e-15)
        assert got == pytest.approx(1.89438e-3, rel=1e-5)

    def test_offset_cancellation(self):
        a, b = np.array([10.0, 0, 0]), np.zeros(3)
        off = -np.linalg.norm(a - b) / SPEED_OF_LIGHT
        assert path_delay(a, b, off) == pytest.approx(0.0, abs=1e-24)

    def test_symmetry(self, rng):
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert path_delay(a, b, 1e-7) == path_delay(b, a, 1e-7)

    def test_zero_distance_rejected(self):
        with pytest.raises(ZeroDistance):
            path_delay([1.0, 1.0, 1.0], [1.0, 1.0, 1.0])


class TestDopplerShift:
    def test_static_satellite(self):
        assert doppler_shift([0, 0, 0], [1e5, 0, 0], [0, 0, 0], 0.02) == 0.0

    def test_default_geometry_is_orthogonal(self):
        # v^T (p_to - p_from) = 5.5e3*1e5 - 5.5e3*1e5 = 0.
        nu = doppler_shift([5.5e3, 5.5e3, 0.0], [-100e3, 100e3, 550e3],
                           [0.0, 0.0, 0.0], 0.0236)
        assert nu == pytest.approx(0.0, abs=1e-9)

    def test_pure_radial_motion(self):
        lam = 0.0236
        d = np.array([3.0, -4.0, 12.0])
        speed = 7.5e3
        v = speed * d / np.linalg.norm(d)
        assert doppler_shift(v, [0, 0, 0], d, lam) == pytest.approx(speed / lam)

    def test_linear_in_velocity(self, rng):
        p_from, p_to = rng.normal(size=3), rng.normal(size=3)
        v1, v2 = rng.normal(size=3), rng.normal(size=3)
        lam = 0.0236
        assert doppler_shift(v1 + 2 * np.asarray(v2), p_from, p_to, lam) == pytest.approx(
            doppler_shift(v1, p_from, p_to, lam) + 2 * doppler_shift(v2, p_from, p_to, lam))

    def test_baseline_scale_invariance(self, rng):
        v, p = rng.normal(size=3), rng.normal(size=3)
        lam = 0.0236
        assert doppler_shift(v, np.zeros(3), p, lam) == pytest.approx(
            doppler_shift(v, np.zeros(3), 9.0 * p, lam), rel=1e-12)


class TestTypes:
    def test_cascaded_delay_matches_direct_expression(self):
        p_s = np.array([-100e3, 100e3, 550e3])
        p_r = np.array([60.0, 10.0, 30.0])
        p_u = np.zeros(3)
        delta = 100e-9
        got = path_delay(p_s, p_r) + path_delay(p_r, p_u, delta)
        expected = (np.linalg.norm(p_s - p_r) + np.linalg.norm(p_r - p_u)) / SPEED_OF_LIGHT + delta
        assert got == pytest.approx(expected, rel=1e-15)

    def test_pose_rejects_non_rotation(self):
        with pytest.raises(ValueError):
            Pose(np.zeros(3), 2.0 * np.eye(3))
        with pytest.raises(ValueError):
            Pose(np.zeros(3), np.diag([1.0, 1.0, -1.0]))  # reflection

    def test_angle_pair_range_checks(self):
        with pytest.raises(ValueError):
            AnglePair(az=4.0, el=0.0)
        with pytest.raises(ValueError):
            AnglePair(az=0.0, el=2.0)
