"""Controller-layer tests: gains, error algebra, flavor structure, wrench."""

import numpy as np
import pytest

from airshipsim import control, kernels, model
from airshipsim.control import ErrorState, GainSet, RankDeficientT
from airshipsim.missions import PositioningMission, VelocityMission


@pytest.fixture(scope="module")
def params():
    return model.default_params()


def random_unit_quat(rng):
    q = rng.standard_normal(4)
    return q / np.linalg.norm(q)


def random_gains(rng, flavor="bsmc", eps=None):
    draw = lambda: np.exp(rng.uniform(np.log(0.01), np.log(2.0), 7))
    return GainSet(
        k1=draw(), l1=draw(), l2=draw(), ls=draw(),
        eps=rng.uniform(0.01, 1.0) if eps is None else eps,
        rho0=rng.uniform(0.0, 0.5),
        switch_mode="fixed",
        flavor=flavor,
    )


class TestGainSet:
    def test_default_gains_values(self):
        g = control.default_gains()
        assert np.array_equal(g.k1, np.full(7, 0.2))
        assert np.array_equal(g.l2, np.full(7, 0.5))
        assert np.array_equal(g.l1, [0.05, 0.05, 0.05, 0.2, 0.2, 0.2, 0.2])
        assert np.array_equal(g.ls, [0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.2])
        assert g.eps == 0.1

    def test_rejects_nonpositive_diagonals(self):
        with pytest.raises(ValueError):
            control.default_gains().replace(k1=[0.0] * 7)

    def test_rejects_bad_flavor_and_mode(self):
        with pytest.raises(ValueError):
            control.default_gains(flavor="pid")
        with pytest.raises(ValueError):
            control.default_gains(switch_mode="sometimes")

    def test_dict_round_trip(self):
        g = control.default_gains("smc", eps=0.5, switch_mode="timevarying")
        g2 = GainSet.from_dict(g.to_dict())
        assert g2.to_dict() == g.to_dict()


class TestErrors:
    def test_perfect_tracking(self):
        mission = VelocityMission(v_d=[0, 0, 0], heading=0.0, origin=[1, 2, 3])
        eta = np.array([1, 2, 3, 0, 0, 0, 1.0])
        z1, z1d = control.tracking_errors(eta, np.zeros(7), mission, 5.0)
        assert np.abs(z1).max() < 1e-15
        assert np.abs(z1d).max() < 1e-15

    def test_positioning_rate_is_pose_rate(self):
        # constant reference: z1_dot equals the measured pose rate
        mission = PositioningMission(target=[5.0, 0.0, -10.0], tolerance_radius=0.0)
        eta = np.array([0, 0, -10.0, 0, 0, 0, 1.0])
        eta_dot = np.array([0.3, -0.2, 0.1, 0, 0, 0.01, 0.0])
        z1, z1d = control.tracking_errors(eta, eta_dot, mission, 0.0)
        assert np.array_equal(z1d, eta_dot)

    def test_plain_subtraction(self):
        rng = np.random.default_rng(0)
        mission = VelocityMission(v_d=[2.0, 0, 0], heading=0.3, origin=[0, 0, -5])
        t = 3.7
        eta = np.concatenate([rng.standard_normal(3), random_unit_quat(rng)])
        eta_dot = rng.standard_normal(7)
        eta_d, eta_d_dot = mission.sample(t)
        z1, z1d = control.tracking_errors(eta, eta_dot, mission, t)
        assert np.array_equal(z1, eta - eta_d)
        assert np.array_equal(z1d, eta_dot - eta_d_dot)

    def test_virtual_velocity(self):
        rng = np.random.default_rng(1)
        eta_d_dot = rng.standard_normal(7)
        k1 = np.full(7, 0.2)
        assert np.array_equal(
            control.virtual_velocity(eta_d_dot, np.zeros(7), k1), eta_d_dot
        )
        z1 = np.eye(7)[0]
        out = control.virtual_velocity(np.zeros(7), z1, k1)
        assert np.allclose(out, -0.2 * z1)
        z1 = rng.standard_normal(7)
        assert np.array_equal(
            control.virtual_velocity(eta_d_dot, z1, k1), eta_d_dot - k1 * z1
        )

    def test_z2(self):
        rng = np.random.default_rng(2)
        k1 = np.full(7, 0.2)
        assert np.array_equal(control.z2_of(np.zeros(7), np.zeros(7), k1), np.zeros(7))
        z1 = rng.standard_normal(7)
        assert np.abs(control.z2_of(-k1 * z1, z1, k1)).max() < 1e-16
        z1d = rng.standard_normal(7)
        assert np.array_equal(control.z2_of(z1d, z1, k1), z1d + k1 * z1)
        err = ErrorState.from_errors(z1, z1d, k1)
        assert np.array_equal(err.sigma, err.z2)
        assert np.abs(err.z2 - (err.z1_dot + k1 * err.z1)).max() < 1e-12


class TestSmoothSign:
    def test_zero(self):
        assert control.smooth_sign(np.zeros(7), 0.1).max() == 0.0

    def test_paper_point(self):
        assert np.isclose(control.smooth_sign(np.array([0.1]), 0.1)[0], 0.5)

    def test_saturation_limit(self):
        out = control.smooth_sign(np.array([1e6, -1e6]), 0.1)
        assert out[0] > 0.9999999 and out[1] < -0.9999999
        assert (np.abs(out) < 1.0).all()

    def test_odd_bounded_monotone(self):
        s = np.linspace(-50, 50, 1001)
        out = control.smooth_sign(s, 0.3)
        assert np.allclose(out + control.smooth_sign(-s, 0.3), 0.0)
        assert (np.abs(out) < 1.0).all()
        assert (np.diff(out) > 0).all()

    def test_converges_to_hard_sign(self):
        rng = np.random.default_rng(3)
        s = rng.standard_normal(100)
        s = s[np.abs(s) > 1e-2]
        assert np.abs(control.smooth_sign(s, 1e-8) - np.sign(s)).max() < 1e-5

    def test_eps_zero_is_hard_sign(self):
        s = np.array([-2.0, 0.0, 3.0])
        assert np.array_equal(control.smooth_sign(s, 0.0), [-1.0, 0.0, 1.0])


class TestSwitchingGain:
    def test_fixed_passthrough(self):
        g = control.default_gains()
        out = control.switching_gain("fixed", g.l1, np.ones(7), 0.3, g.ls)
        assert np.array_equal(out, g.ls)

    def test_timevarying_zero_error(self):
        g = control.default_gains()
        out = control.switching_gain("timevarying", g.l1, np.zeros(7), 0.1, g.ls)
        assert np.array_equal(out, np.full(7, 0.1))

    def test_paper_gain_point(self):
        g = control.default_gains()
        z1 = np.zeros(7)
        z1[0] = 1.0
        out = control.switching_gain("timevarying", g.l1, z1, 0.1, g.ls)
        assert np.allclose(out, np.full(7, 0.05 + 0.1))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        g = control.default_gains()
        for _ in range(100):
            z1 = rng.standard_normal(7) * 3
            out = control.switching_gain("timevarying", g.l1, z1, 0.2, g.ls)
            expected = max(abs(g.l1[i] * z1[i]) for i in range(7)) + 0.2
            assert np.allclose(out, np.full(7, expected))


class TestControlAccel:
    def test_equilibrium(self):
        err = ErrorState.from_errors(np.zeros(7), np.zeros(7), np.full(7, 0.2))
        for flavor in ("bs", "smc", "bsmc"):
            g = control.default_gains(flavor)
            assert np.abs(control.control_accel(err, g)).max() == 0.0

    def test_flavor_term_identities(self):
        # BSMC + Ls*sat(z2) - BS == 0 and BSMC - SMC == -L1 z1, same state
        rng = np.random.default_rng(5)
        for _ in range(50):
            gb = random_gains(rng, "bsmc")
            z1, z1d = rng.standard_normal(7), rng.standard_normal(7)
            err = ErrorState.from_errors(z1, z1d, gb.k1)
            out = {}
            for flavor in ("bs", "smc", "bsmc"):
                out[flavor] = control.control_accel(err, gb.replace(flavor=flavor))
            switch_term = gb.ls * control.smooth_sign(err.z2, gb.eps)
            assert np.abs(out["bsmc"] + switch_term - out["bs"]).max() < 1e-15
            assert np.abs(out["bsmc"] - out["smc"] + gb.l1 * err.z1).max() < 1e-15

    def test_difference_independent_of_z1_at_fixed_z2(self):
        # sweep z1 holding z2: BSMC - BS stays put
        rng = np.random.default_rng(6)
        g = control.default_gains("bsmc")
        z2 = rng.standard_normal(7)
        base = None
        for _ in range(20):
            z1 = rng.standard_normal(7) * 5
            z1d = z2 - g.k1 * z1
            err = ErrorState.from_errors(z1, z1d, g.k1)
            assert np.abs(err.z2 - z2).max() < 1e-12
            diff = control.control_accel(err, g) - control.control_accel(
                err, g.replace(flavor="bs")
            )
            if base is None:
                base = diff
            assert np.abs(diff - base).max() < 1e-12

    def test_z1_jacobian_by_flavor(self):
        # gain independence: the z2 dynamics z2_dot = accel_cmd + K1 z1_dot
        # depend on z1 through exactly -L1 (BS/BSMC) or not at all (SMC)
        rng = np.random.default_rng(7)
        g = control.default_gains()
        z2 = rng.standard_normal(7)
        h = 1e-6
        for flavor, expected_gain in (("bs", -g.l1), ("bsmc", -g.l1), ("smc", np.zeros(7))):
            gf = g.replace(flavor=flavor)
            for ch in range(7):
                z1 = rng.standard_normal(7)
                dz = np.zeros(7)
                dz[ch] = h
                def z2_dot_at(z1v):
                    z1d = z2 - gf.k1 * z1v
                    err = ErrorState.from_errors(z1v, z1d, gf.k1)
                    return control.control_accel(err, gf) + gf.k1 * z1d
                col = (z2_dot_at(z1 + dz) - z2_dot_at(z1 - dz)) / (2 * h)
                expected = np.zeros(7)
                expected[ch] = expected_gain[ch]
                assert np.abs(col - expected).max() < 1e-8


class TestControlWrench:
    def test_push_through_position_rows_random_states(self, params):
        # the three position rows of the realized pose acceleration match the
        # command at fully random states (the quaternion channel is exact
        # only on the realizable subspace, checked below)
        rng = np.random.default_rng(8)
        worst = 0.0
        for _ in range(200):
            g = random_gains(rng, flavor=rng.choice(["bs", "smc", "bsmc"]))
            q = random_unit_quat(rng)
            x = rng.standard_normal(6)
            eta = np.concatenate([rng.standard_normal(3), q])
            err = ErrorState.from_errors(
                rng.standard_normal(7), rng.standard_normal(7), g.k1
            )
            f = control.control_wrench(x, eta, err, g, params)
            acc = model.pose_accel(x, model.dynamics(x, eta, f, params), eta)
            cmd = control.control_accel(err, g)
            worst = max(worst, np.abs(acc[:3] - cmd[:3]).max())
        assert worst < 1e-8

    def test_push_through_full_rows_on_realizable_states(self, params):
        # zero attitude error and zero angular rate: all seven rows match,
        # which also proves the moment channels cancel exactly
        rng = np.random.default_rng(9)
        worst = 0.0
        for _ in range(200):
            g = random_gains(rng, flavor=rng.choice(["bs", "smc", "bsmc"]))
            q = random_unit_quat(rng)
            x = np.concatenate([rng.standard_normal(3), np.zeros(3)])
            eta = np.concatenate([rng.standard_normal(3), q])
            z1 = np.concatenate([rng.standard_normal(3), np.zeros(4)])
            z1d = np.concatenate([rng.standard_normal(3), np.zeros(4)])
            err = ErrorState.from_errors(z1, z1d, g.k1)
            f = control.control_wrench(x, eta, err, g, params)
            acc = model.pose_accel(x, model.dynamics(x, eta, f, params), eta)
            cmd = control.control_accel(err, g)
            worst = max(worst, np.abs(acc - cmd).max())
        assert worst < 1e-8

    def test_trim_wrench_at_zero_error(self, params):
        # zero errors, zero rates, level pose: pure feedforward
        g = control.default_gains()
        eta = np.array([0, 0, -50.0, 0, 0, 0, 1.0])
        x = np.zeros(6)
        err = ErrorState.from_errors(np.zeros(7), np.zeros(7), g.k1)
        f = control.control_wrench(x, eta, err, g, params)
        expected = -kernels.gravity_wrench(
            eta[3:], params.c, params.m, params.m_w, params.g
        )
        assert np.abs(f - expected).max() < 1e-12

    def test_flavor_algebra_exact(self, params):
        # wrench differences equal the mapped single terms, machine precision
        rng = np.random.default_rng(10)
        for _ in range(100):
            g = random_gains(rng, "bsmc")
            q = random_unit_quat(rng)
            x = rng.standard_normal(6)
            eta = np.concatenate([rng.standard_normal(3), q])
            err = ErrorState.from_errors(
                rng.standard_normal(7), rng.standard_normal(7), g.k1
            )
            f = {
                fl: control.control_wrench(x, eta, err, g.replace(flavor=fl), params)
                for fl in ("bs", "smc", "bsmc")
            }
            Tp = control.t_pseudo_inverse(q)
            mapped_switch = params.M @ (Tp @ (g.ls * control.smooth_sign(err.z2, g.eps)))
            mapped_l1 = params.M @ (Tp @ (g.l1 * err.z1))
            assert np.abs(f["bsmc"] - f["bs"] + mapped_switch).max() < 1e-10
            assert np.abs(f["bsmc"] - f["smc"] + mapped_l1).max() < 1e-10

    def test_z1_wrench_jacobian_difference(self, params):
        # sensitivity of f wrt z1 differs between BSMC and SMC by -M T+ L1
        rng = np.random.default_rng(11)
        g = control.default_gains()
        q = random_unit_quat(rng)
        x = rng.standard_normal(6)
        eta = np.concatenate([rng.standard_normal(3), q])
        Tp = control.t_pseudo_inverse(q)
        h = 1e-6
        for ch in range(7):
            z1 = rng.standard_normal(7)
            z1d = rng.standard_normal(7)
            dz = np.zeros(7)
            dz[ch] = h
            def wrench(flavor, z1v):
                err = ErrorState.from_errors(z1v, z1d, g.k1)
                return control.control_wrench(x, eta, err, g.replace(flavor=flavor), params)
            d_bsmc = (wrench("bsmc", z1 + dz) - wrench("bsmc", z1 - dz)) / (2 * h)
            d_smc = (wrench("smc", z1 + dz) - wrench("smc", z1 - dz)) / (2 * h)
            expected = -(params.M @ Tp)[:, ch] * g.l1[ch]
            assert np.abs((d_bsmc - d_smc) - expected).max() < 1e-6

    def test_rank_check_on_degenerate_matrix(self):
        T = np.zeros((7, 6))
        T[:3, :3] = np.eye(3)  # columns 4..6 identically zero
        _, ok = kernels.pinv_full_column(T)
        assert not ok

    def test_pinv_matches_numpy(self):
        rng = np.random.default_rng(12)
        q = random_unit_quat(rng)
        Tp = control.t_pseudo_inverse(q)
        T = model.build_T(q)
        assert np.abs(Tp - np.linalg.pinv(T)).max() < 1e-12


class TestLyapunov:
    def test_zero_at_origin(self):
        g = control.default_gains()
        err = ErrorState.from_errors(np.zeros(7), np.zeros(7), g.k1)
        assert control.lyapunov(err, g.l1) == 0.0
        z1 = np.ones(7)
        err = ErrorState.from_errors(z1, np.zeros(7), g.k1)
        assert control.lyapunov(err, g.l1) > 0.0

    def test_matches_quadratic_form(self):
        rng = np.random.default_rng(13)
        g = control.default_gains()
        z1, z1d = rng.standard_normal(7), rng.standard_normal(7)
        err = ErrorState.from_errors(z1, z1d, g.k1)
        expected = 0.5 * z1 @ (g.l1 * z1) + 0.5 * err.z2 @ err.z2
        assert np.isclose(control.lyapunov(err, g.l1), expected)

    def test_bs_rate_negative(self):
        rng = np.random.default_rng(14)
        g = control.default_gains("bs")
        for _ in range(200):
            z1, z1d = rng.standard_normal(7), rng.standard_normal(7)
            err = ErrorState.from_errors(z1, z1d, g.k1)
            rate = control.lyapunov_rate(err, g)
            expected = -z1 @ (g.l1 * g.k1 * z1) - err.z2 @ (g.l2 * err.z2)
            assert np.isclose(rate, expected)
            if np.abs(z1).max() > 1e-12 or np.abs(err.z2).max() > 1e-12:
                assert rate < 0


class TestSigmaSigmadot:
    def test_zero_sigma(self):
        g = control.default_gains()
        err = ErrorState.from_errors(np.zeros(7), np.zeros(7), g.k1)
        assert control.sigma_sigmadot(err, g) == 0.0

    def test_timevarying_always_negative(self):
        # invariance property over 1e5 random error states
        rng = np.random.default_rng(15)
        g = control.default_gains("bsmc", switch_mode="timevarying")
        z1 = rng.standard_normal((100_000, 7)) * 3
        z1d = rng.standard_normal((100_000, 7)) * 3
        vals = np.empty(len(z1))
        for i in range(len(z1)):
            err = ErrorState.from_errors(z1[i], z1d[i], g.k1)
            vals[i] = control.sigma_sigmadot(err, g)
        nonzero = np.abs(z1d + g.k1 * z1).max(axis=1) > 1e-12
        assert (vals[nonzero] < 0).all()

    def test_fixed_gain_dual_behavior_instance(self):
        # grid search finds a state with sigma' sigma_dot > 0 under fixed gain
        g = control.default_gains("bsmc", eps=0.0)
        found = False
        for z1_mag in np.linspace(-10, 10, 21):
            for z2_mag in np.linspace(-0.5, 0.5, 21):
                z1 = np.zeros(7)
                z1[0] = z1_mag
                z2 = np.zeros(7)
                z2[0] = z2_mag
                err = ErrorState(z1, z2 - g.k1 * z1, z2)
                if control.sigma_sigmadot(err, g) > 0:
                    found = True
                    break
            if found:
                break
        assert found
