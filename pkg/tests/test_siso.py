"""SISO testbed: design boxes, recursion identities, reaching, dual behavior."""

import numpy as np
import pytest
import sympy as sp

from airshipsim import siso
from airshipsim.siso import (
    ChainPlant,
    DegenerateInputGain,
    SisoGains,
    UnsupportedOrder,
    backstepping_vdot,
    bsmc1_control,
    bsmc2_control,
    chain_errors,
    double_integrator,
    rho_crit,
    run_chain,
    sigma_b2_coeffs,
)


def gains2(rho=0.1, k1=0.5, lam1=0.5, lam2=0.5, tv=False, rho0=0.0, c1=1.0):
    return SisoGains(k=(k1,), lam=(lam1, lam2), c=(c1,), rho=rho, rho0=rho0,
                     time_varying=tv)


def gains3(rho=0.1, tv=False, rho0=0.0):
    return SisoGains(k=(0.6, 0.8), lam=(0.5, 0.7, 0.9), c=(1.0, 1.4), rho=rho,
                     rho0=rho0, time_varying=tv)


class TestGainValidation:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gains2(k1=0.0)
        with pytest.raises(ValueError):
            gains2(lam1=-1.0)
        with pytest.raises(ValueError):
            gains2(c1=-1.0)
        with pytest.raises(ValueError):
            gains2(rho=-0.1)

    def test_rejects_order_mismatch(self):
        with pytest.raises(ValueError):
            SisoGains(k=(0.5, 0.5), lam=(0.5, 0.5), c=(1.0,), rho=0.1)
        with pytest.raises(UnsupportedOrder):
            SisoGains(k=(0.5,) * 3, lam=(0.5,) * 4, c=(1.0,) * 3, rho=0.1)

    def test_hurwitz_gate_accepts_positive(self):
        # degree <= 2 with positive coefficients is always Hurwitz
        gains3()

    def test_plant_order_capped(self):
        with pytest.raises(UnsupportedOrder):
            ChainPlant(n=4)

    def test_degenerate_gain(self):
        plant = ChainPlant(n=2, g_n=lambda x: 0.0)
        with pytest.raises(DegenerateInputGain):
            bsmc2_control([1.0, 0.0], gains2(), plant)


class TestControllers:
    def test_feedforward_only_at_origin(self):
        plant = ChainPlant(n=2, f_n=lambda x: 1.7, g_n=lambda x: 2.0)
        x = np.zeros(2)
        assert np.isclose(bsmc2_control(x, gains2(), plant), -1.7 / 2.0)
        assert np.isclose(bsmc1_control(x, gains2(), plant), -1.7 / 2.0)

    def test_hand_expanded_double_integrator(self):
        # u = (k1^2 - lam1) z1 - (k1 + lam2) z2 - rho sgn(z2); frozen at
        # state (1, 0) with k1=0.5, lam=(0.4, 0.3), rho=0.1: u = -0.65
        g = SisoGains(k=(0.5,), lam=(0.4, 0.3), c=(1.0,), rho=0.1)
        u = bsmc2_control([1.0, 0.0], g, double_integrator())
        assert np.isclose(u, -0.65)

    def test_bsmc1_closed_loop_ssd_always_negative(self):
        log = run_chain(double_integrator(), gains2(rho=0.05), "bsmc1",
                        [2.0, -1.0], 1e-3, 20.0)
        nonzero = np.abs(log.sigma) > 1e-12
        assert (log.sigma_sigmadot[nonzero] < 0).all()

    def test_bsmc2_timevarying_ssd_always_negative(self):
        log = run_chain(double_integrator(), gains2(tv=True, rho0=0.1), "bsmc2",
                        [2.0, -1.0], 1e-3, 20.0)
        nonzero = np.abs(log.sigma) > 1e-12
        assert (log.sigma_sigmadot[nonzero] < 0).all()

    def test_bsmc2_feedback_contains_znm1_term_bsmc1_does_not(self):
        # formula-level sensitivity wrt z_{n-1} holding the other inputs
        g = gains2()
        z = np.array([1.3, -0.7])
        zdot = np.array([0.2, np.nan])
        h = 1e-6
        dz = np.array([h, 0.0])
        for fb, expected in ((siso._bsmc2_feedback, -g.lam[0]), (siso._bsmc1_feedback, 0.0)):
            d = (
                fb(z + dz, zdot, 0.31, -0.7, g, g.rho)
                - fb(z - dz, zdot, 0.31, -0.7, g, g.rho)
            ) / (2 * h)
            assert np.isclose(d, expected, atol=1e-9)


class TestSigmaB2:
    def test_n2_coefficients(self):
        assert sigma_b2_coeffs(gains2(k1=0.2)) == (0.2, 1.0)

    def test_degenerate_k1(self):
        # k1 -> 0 collapses the surface to z1_dot alone
        coeffs = sigma_b2_coeffs(gains2(k1=1e-12))
        assert np.isclose(coeffs[0], 0.0, atol=1e-10)
        assert coeffs[1] == 1.0

    def test_n3_matches_symbolic_recursion(self):
        # z3 expanded symbolically through the recursion
        k1, k2 = sp.symbols("k1 k2", positive=True)
        z1 = sp.Function("z1")
        t = sp.Symbol("t")
        zd1 = z1(t).diff(t)
        z2 = zd1 + k1 * z1(t)
        z3 = sp.expand(z2.diff(t) + k2 * z2 + z1(t))
        poly = sp.Poly(z3, z1(t), zd1, z1(t).diff(t, 2))
        g = gains3()
        expected = sigma_b2_coeffs(g, 3)
        subs = {k1: g.k[0], k2: g.k[1]}
        assert np.isclose(float(poly.coeff_monomial(z1(t)).subs(subs)), expected[0])
        assert np.isclose(float(poly.coeff_monomial(zd1).subs(subs)), expected[1])
        assert np.isclose(float(poly.coeff_monomial(z1(t).diff(t, 2)).subs(subs)), expected[2])

    def test_rejects_large_order(self):
        with pytest.raises(UnsupportedOrder):
            sigma_b2_coeffs(gains2(), 4)


class TestRhoCrit:
    def test_zero_error(self):
        assert rho_crit(0.5, 0.0) == 0.0

    def test_direct_product(self):
        assert rho_crit(0.5, 2.0) == 1.0
        assert rho_crit(0.5, -2.0) == 1.0

    def test_bound_chain(self):
        # rho slightly above critical restores strict negativity
        rng = np.random.default_rng(0)
        g = gains2()
        for _ in range(1000):
            z = rng.standard_normal(2) * 5
            rho = rho_crit(g.lam[0], z[0]) + 0.01
            ssd = siso.bsmc2_sigma_sigmadot(z, g, rho=rho)
            bound = -g.lam[1] * z[1] ** 2 - (rho - rho_crit(g.lam[0], z[0])) * abs(z[1])
            assert ssd <= bound + 1e-12
            if abs(z[1]) > 1e-12:
                assert ssd < 0


class TestBacksteppingVdot:
    def test_zero(self):
        assert backstepping_vdot([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_direct_sum(self):
        assert backstepping_vdot([1.0, 1.0], [1.0, 2.0]) == -3.0

    def test_recursion_oracle_machine_precision(self):
        # V_dot = sum z_i z_i_dot with the recursion z' = z_{i+1} - k z - z_{i-1}
        rng = np.random.default_rng(1)
        for _ in range(2000):
            n = rng.choice([2, 3])
            z = rng.standard_normal(n) * 3
            k = np.exp(rng.uniform(np.log(0.05), np.log(3.0), n))
            zdot = np.empty(n)
            for i in range(n):
                zdot[i] = -k[i] * z[i]
                if i + 1 < n:
                    zdot[i] += z[i + 1]
                if i > 0:
                    zdot[i] -= z[i - 1]
            direct = float(z @ zdot)
            vdot = backstepping_vdot(z, k)
            scale = 1.0 + np.abs(z * zdot).sum() + np.abs(k * z * z).sum()
            assert abs(direct - vdot) <= 1e-12 * scale


class TestClosedLoopProperties:
    def test_reaching_and_invariance_timevarying(self):
        # property 2 on the double integrator: finite reaching, then stay
        log = run_chain(double_integrator(), gains2(tv=True, rho0=0.1), "bsmc2",
                        [1.0, 0.0], 1e-4, 20.0)
        inside = np.abs(log.sigma) < 1e-3
        assert inside.any()
        t_r = log.t[int(np.argmax(inside))]
        assert t_r < 10.0
        assert inside[int(np.argmax(inside)):].all()

    def test_dual_behavior_fixed_gain(self):
        # fixed rho below critical: sigma sigma_dot goes positive while the
        # weighted Lyapunov function still decreases, then convergence
        log = run_chain(double_integrator(), gains2(rho=0.05, k1=0.2), "bsmc2",
                        [10.0, 0.0], 1e-3, 60.0)
        vdot = np.gradient(log.lyapunov, log.t)
        assert ((log.sigma_sigmadot > 0) & (vdot < 0)).any()
        assert np.abs(log.z[-1]).max() < 1e-3

    def test_bsmc2_vdot_closed_form_matches_fd(self):
        # n=2: the weighted certificate derivative matches a finite difference
        g = gains2(rho=0.05, k1=0.2)
        log = run_chain(double_integrator(), g, "bsmc2", [3.0, 1.0], 1e-4, 5.0)
        vdot_fd = np.gradient(log.lyapunov, log.t)
        closed = np.array([siso.bsmc2_vdot(z, g) for z in log.z])
        mid = slice(100, -100)
        err = np.abs(vdot_fd[mid] - closed[mid])
        assert np.median(err) < 1e-4

    def test_bsmc2_box_vdot_nonpositive(self):
        rng = np.random.default_rng(2)
        g2 = gains2()
        for _ in range(1000):
            z = rng.standard_normal(2) * 4
            assert siso.bsmc2_vdot(z, g2) <= 0
        # the n=3 form carries a (1 - lam2) z1 z2 cross term, so it is only
        # sign-definite when lam2 = 1 closes the telescoping cancellation
        g3_unit = SisoGains(k=(0.6, 0.8), lam=(0.5, 1.0, 0.9), c=(1.0, 1.4), rho=0.1)
        for _ in range(1000):
            z = rng.standard_normal(3) * 4
            assert siso.bsmc2_vdot(z, g3_unit) <= 0

    def test_chain_errors_recursion_consistency(self):
        # z1_dot from the recursion equals the kinematic derivative x2 etc.
        rng = np.random.default_rng(3)
        g = gains3()
        for _ in range(50):
            x = rng.standard_normal(3)
            z, zdot, _ = chain_errors(x, g)
            assert np.isclose(zdot[0], z[1] - g.k[0] * z[0])
            assert np.isclose(zdot[1], z[2] - g.k[1] * z[1] - z[0])

    def test_alpha_dot_analytic_vs_fd(self):
        # the stabilizing-function derivative matches a finite difference
        # along the true closed-loop flow
        g = gains2()
        plant = double_integrator()
        x = np.array([1.2, -0.4])
        u = bsmc2_control(x, g, plant)
        h = 1e-6
        xp = x + h * plant.derivative(x, u)
        xm = x - h * plant.derivative(x, u)
        def alpha1(xv):
            return -g.k[0] * xv[0]
        fd = (alpha1(xp) - alpha1(xm)) / (2 * h)
        _, _, alpha_dot = chain_errors(x, g)
        assert np.isclose(alpha_dot, fd, atol=1e-6)
