"""Mission reference tests: positioning geometry, path schedule, velocity."""

import numpy as np
import pytest

from airshipsim import model
from airshipsim.missions import (
    OutOfScheduleTime,
    PathMission,
    PositioningMission,
    VelocityMission,
    mission_from_dict,
    positioning_reference,
    precompute_reference,
    velocity_reference,
)

LEVEL = np.array([0.0, 0.0, 0.0, 1.0])


class TestPositioning:
    def test_zero_error_inside_circle(self):
        pose = np.concatenate([[0.0, 0.0, -50.0], LEVEL])
        eta_d, eta_d_dot = positioning_reference(
            [0.0, 0.0, -50.0], 2.5, pose, wind_dir=[-1.0, 0.0, 0.0]
        )
        assert np.array_equal(eta_d[:3], pose[:3])
        assert np.abs(eta_d_dot).max() == 0.0

    def test_radius_zero_is_fixed_point(self):
        pose = np.concatenate([[10.0, 3.0, -50.0], LEVEL])
        eta_d, _ = positioning_reference([0.0, 0.0, -50.0], 0.0, pose)
        assert np.array_equal(eta_d[:3], [0.0, 0.0, -50.0])

    def test_circle_projection_geometry(self):
        # vehicle 10 m out: reference on the circle, 7.5 m from the vehicle
        pose = np.concatenate([[6.0, 8.0, -50.0], LEVEL])
        eta_d, _ = positioning_reference([0.0, 0.0, -50.0], 2.5, pose)
        assert np.isclose(np.hypot(*eta_d[:2]), 2.5)
        assert np.isclose(np.hypot(*(pose[:2] - eta_d[:2])), 7.5)
        # reference sits on the bearing line from the target to the vehicle
        assert np.isclose(eta_d[0] / eta_d[1], 6.0 / 8.0)

    def test_heading_into_wind(self):
        pose = np.concatenate([[0.0, 0.0, -50.0], LEVEL])
        # wind out of the East: v_w = (0, -2, 0); desired heading yaw = +90
        eta_d, _ = positioning_reference([0.0, 0.0, -50.0], 2.5, pose, [0.0, -2.0, 0.0])
        expected = model.yaw_quat(np.pi / 2)
        assert np.abs(eta_d[3:] - expected).max() < 1e-12

    def test_fallback_yaw_without_wind(self):
        mission = PositioningMission(target=[0.0, 0.0, -50.0], tolerance_radius=2.5,
                                     fallback_yaw=0.7)
        pose = np.concatenate([[5.0, 5.0, -50.0], LEVEL])
        eta_d, _ = mission.sample(0.0, pose=pose, wind_hat=np.zeros(3))
        assert np.abs(eta_d[3:] - model.yaw_quat(0.7)).max() < 1e-12

    def test_hemisphere_alignment(self):
        # reference quaternion flips sign to stay near the current attitude
        q = -model.yaw_quat(0.7)  # same rotation, opposite sign
        pose = np.concatenate([[5.0, 0.0, -50.0], q])
        mission = PositioningMission(target=[0.0, 0.0, -50.0], fallback_yaw=0.7)
        eta_d, _ = mission.sample(0.0, pose=pose, wind_hat=np.zeros(3))
        assert eta_d[3:] @ q > 0
        assert np.abs(eta_d[3:] + model.yaw_quat(0.7)).max() < 1e-12

    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            PositioningMission(target=[0, 0, 0], tolerance_radius=-1.0)


@pytest.fixture(scope="module")
def path():
    return PathMission()


class TestPath:
    def test_starts_at_launch_point(self, path):
        eta_d, _ = path.sample(0.0)
        assert np.allclose(eta_d[:3], [0.0, 0.0, 0.0], atol=1e-12)

    def test_cruise_groundspeed_exact(self, path):
        for t in np.linspace(path.cruise_start + path.speed_ramp + 1,
                             path.cruise_end - path.speed_ramp - 1, 7):
            _, eta_d_dot = path.sample(float(t))
            assert abs(np.hypot(eta_d_dot[0], eta_d_dot[1]) - path.cruise_speed) < 1e-9

    def test_rate_matches_finite_difference(self, path):
        rng = np.random.default_rng(0)
        h = 1e-5
        checked = 0
        while checked < 200:
            t = rng.uniform(0.5, path.duration - 0.5)
            if min(abs(t - j) for j in path.joint_times) < 0.05:
                continue
            ep, _ = path.sample(t + h)
            em, _ = path.sample(t - h)
            _, ed = path.sample(t)
            assert np.abs((ep - em) / (2 * h) - ed).max() < 1e-6
            checked += 1

    def test_reference_quaternion_unit(self, path):
        for t in np.linspace(0.0, path.duration, 300):
            eta_d, _ = path.sample(float(t))
            assert abs(np.linalg.norm(eta_d[3:]) - 1.0) < 1e-12

    def test_position_continuous_across_joints(self, path):
        for tj in path.joint_times:
            before, _ = path.sample(tj - 1e-7)
            after, _ = path.sample(tj + 1e-7)
            assert np.abs(after - before).max() < 1e-4

    def test_altitude_profile(self, path):
        assert np.isclose(path.sample(0.0)[0][2], 0.0, atol=1e-12)
        mid_up = path.shift_start + path.shift_ramp + 1.0
        if mid_up < path.joint_times[3]:
            assert np.isclose(path.sample(mid_up)[0][2],
                              -(path.cruise_alt + path.shift_amount))
        end, _ = path.sample(path.duration)
        assert abs(end[2]) < 1e-9

    def test_takeoff_climb_rate_bounded(self, path):
        rates = [-path.sample(float(t))[1][2]
                 for t in np.linspace(0.1, path.cruise_start - 0.1, 100)]
        assert max(rates) <= 1.5 * path.cruise_alt / path.takeoff_duration + 1e-9

    def test_out_of_schedule(self, path):
        with pytest.raises(OutOfScheduleTime):
            path.sample(path.duration + 1.0)
        with pytest.raises(OutOfScheduleTime):
            path.sample(-0.5)

    def test_yaw_tangent_to_path(self, path):
        t = path.cruise_start + path.cruise_duration * 0.37
        eta_d, eta_d_dot = path.sample(t)
        psi_from_vel = np.arctan2(eta_d_dot[1], eta_d_dot[0])
        S = model.rotation_from_quaternion(eta_d[3:])
        nose_inertial = S.T @ np.array([1.0, 0.0, 0.0])
        psi_ref = np.arctan2(nose_inertial[1], nose_inertial[0])
        assert abs((psi_from_vel - psi_ref + np.pi) % (2 * np.pi) - np.pi) < 1e-9


class TestVelocity:
    def test_zero_velocity_constant_reference(self):
        mission = VelocityMission(v_d=[0, 0, 0], origin=[1, 2, 3])
        e0, ed0 = mission.sample(0.0)
        e9, ed9 = mission.sample(9.0)
        assert np.array_equal(e0, e9)
        assert np.abs(ed0).max() == 0.0

    def test_straight_line_displacement(self):
        mission = velocity_reference([5.0, 0.0, 0.0],
                                     np.concatenate([[0, 0, -50.0], LEVEL]))
        eta_d, eta_d_dot = mission.sample(10.0)
        assert np.allclose(eta_d[:3], [50.0, 0.0, -50.0], atol=1e-9)
        assert np.allclose(eta_d_dot[:3], [5.0, 0.0, 0.0], atol=1e-12)

    def test_heading_rotates_displacement(self):
        # 30 degree heading: displacement along the rotated body x axis
        psi = np.radians(30.0)
        mission = VelocityMission(v_d=[5.0, 0.0, 0.0], heading=psi)
        _, eta_d_dot = mission.sample(0.0)
        expected = 5.0 * np.array([np.cos(psi), np.sin(psi), 0.0])
        assert np.allclose(eta_d_dot[:3], expected, atol=1e-12)
        assert np.abs(eta_d_dot[3:]).max() == 0.0

    def test_rate_is_T_times_xd(self):
        psi = 0.42
        v_d = np.array([3.0, -1.0, 0.5])
        mission = VelocityMission(v_d=v_d, heading=psi)
        q_d = model.yaw_quat(psi)
        expected = model.build_T(q_d) @ np.concatenate([v_d, np.zeros(3)])
        _, eta_d_dot = mission.sample(1.0)
        assert np.allclose(eta_d_dot, expected, atol=1e-12)


class TestPlumbing:
    def test_mission_round_trip(self):
        for mission in (
            PositioningMission(target=[1, 2, 3], tolerance_radius=1.0),
            VelocityMission(v_d=[1, 0, 0], heading=0.3),
            PathMission(semi_major=150.0, semi_minor=100.0),
        ):
            again = mission_from_dict(mission.to_dict())
            assert type(again) is type(mission)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            mission_from_dict({"kind": "loiter"})

    def test_precompute_hemisphere_continuity(self):
        mission = PathMission()
        t_grid = np.linspace(0.0, mission.duration, 2000)
        ref_eta, ref_etadot = precompute_reference(mission, t_grid, LEVEL)
        dots = np.einsum("ij,ij->i", ref_eta[:-1, 3:], ref_eta[1:, 3:])
        assert (dots > 0).all()
        norms = np.linalg.norm(ref_eta[:, 3:], axis=1)
        assert np.abs(norms - 1).max() < 1e-12
