"""Hot numeric kernels shared by the model, controller and simulation loop.

Every function in this module operates on plain float64 ndarrays so that the
same source can run in two backends:

* numba ``@njit`` (default when numba is importable), used for the fused
  closed-loop kernel ``run_closed_loop`` that dominates runtime;
* a pure numpy fallback, selected by setting the environment variable
  ``AIRSHIPSIM_NUMBA=0`` before import.

Conventions (used consistently everywhere):

* quaternions are scalar-last ``[qx, qy, qz, qw]`` with Hamilton products;
* ``rot_i2b(q)`` is the matrix S mapping inertial vectors into the body
  frame; ``rot_b2i(q) = S.T`` maps body to inertial;
* body rates drive the attitude through ``q_dot = 0.5 * q (x) (omega, 0)``;
* the 7-vector pose is ``eta = [pN, pE, pD, qx, qy, qz, qw]`` and the
  6-vector velocity state is ``x = [u, v, w, wx, wy, wz]`` (air-relative
  linear velocity plus body angular velocity).

The public modules wrap these cores with validation and friendlier types;
tests pin the numba and numpy paths against each other.
"""

import math
import os

import numpy as np

try:
    import numba as _numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

NUMBA_ENV_VAR = "AIRSHIPSIM_NUMBA"
NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get(NUMBA_ENV_VAR, "1") != "0"
BACKEND = "numba" if NUMBA_ENABLED else "numpy"

if NUMBA_ENABLED:

    def _jit(fn):
        return _numba.njit(cache=True)(fn)

else:

    def _jit(fn):
        return fn


# Integer codes shared with the wrapper modules.
FLAVOR_BS = 0
FLAVOR_SMC = 1
FLAVOR_BSMC = 2

SWITCH_FIXED = 0
SWITCH_TIMEVARYING = 1

MISSION_POSITIONING = 0
MISSION_PRECOMPUTED = 1

STATUS_OK = 0
STATUS_BLOWUP = 1
STATUS_RANK_DEFICIENT = 2

RANK_TOLERANCE = 1e-10


# ---------------------------------------------------------------------------
# small vector / rotation helpers
# ---------------------------------------------------------------------------


@_jit
def cross3(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@_jit
def skew3(v):
    out = np.zeros((3, 3))
    out[0, 1] = -v[2]
    out[0, 2] = v[1]
    out[1, 0] = v[2]
    out[1, 2] = -v[0]
    out[2, 0] = -v[1]
    out[2, 1] = v[0]
    return out


@_jit
def quat_normalize(q):
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return q / n


@_jit
def rot_b2i(q):
    """Rotation matrix sending body-frame vectors to the inertial frame."""
    x, y, z, w = q[0], q[1], q[2], q[3]
    R = np.empty((3, 3))
    R[0, 0] = 1.0 - 2.0 * (y * y + z * z)
    R[0, 1] = 2.0 * (x * y - z * w)
    R[0, 2] = 2.0 * (x * z + y * w)
    R[1, 0] = 2.0 * (x * y + z * w)
    R[1, 1] = 1.0 - 2.0 * (x * x + z * z)
    R[1, 2] = 2.0 * (y * z - x * w)
    R[2, 0] = 2.0 * (x * z - y * w)
    R[2, 1] = 2.0 * (y * z + x * w)
    R[2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return R


@_jit
def rot_i2b(q):
    """The matrix S: inertial -> body (transpose of rot_b2i)."""
    x, y, z, w = q[0], q[1], q[2], q[3]
    S = np.empty((3, 3))
    S[0, 0] = 1.0 - 2.0 * (y * y + z * z)
    S[0, 1] = 2.0 * (x * y + z * w)
    S[0, 2] = 2.0 * (x * z - y * w)
    S[1, 0] = 2.0 * (x * y - z * w)
    S[1, 1] = 1.0 - 2.0 * (x * x + z * z)
    S[1, 2] = 2.0 * (y * z + x * w)
    S[2, 0] = 2.0 * (x * z + y * w)
    S[2, 1] = 2.0 * (y * z - x * w)
    S[2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return S


@_jit
def quat_rate_matrix(q):
    """Orthogonal 4x4 matrix relating body rates to quaternion derivatives.

    Acts on the scalar-first 4-vector ``[0, wx, wy, wz]`` and returns the
    scalar-last derivative layout: ``q_dot = 0.5 * Qm @ [0, omega]``, which
    equals the Hamilton product ``0.5 * q (x) (omega, 0)``.  The first column
    is q itself, making the matrix orthogonal for unit q.
    """
    x, y, z, w = q[0], q[1], q[2], q[3]
    Qm = np.empty((4, 4))
    Qm[0, 0] = x
    Qm[0, 1] = w
    Qm[0, 2] = -z
    Qm[0, 3] = y
    Qm[1, 0] = y
    Qm[1, 1] = z
    Qm[1, 2] = w
    Qm[1, 3] = -x
    Qm[2, 0] = z
    Qm[2, 1] = -y
    Qm[2, 2] = x
    Qm[2, 3] = w
    Qm[3, 0] = w
    Qm[3, 1] = -x
    Qm[3, 2] = -y
    Qm[3, 3] = -z
    return Qm


@_jit
def quat_derivative(q, omega):
    """q_dot = 0.5 * q (x) (omega, 0), written out."""
    x, y, z, w = q[0], q[1], q[2], q[3]
    wx, wy, wz = omega[0], omega[1], omega[2]
    out = np.empty(4)
    out[0] = 0.5 * (w * wx + y * wz - z * wy)
    out[1] = 0.5 * (w * wy + z * wx - x * wz)
    out[2] = 0.5 * (w * wz + x * wy - y * wx)
    out[3] = -0.5 * (x * wx + y * wy + z * wz)
    return out


@_jit
def yaw_quat(psi):
    out = np.zeros(4)
    out[2] = math.sin(0.5 * psi)
    out[3] = math.cos(0.5 * psi)
    return out


# ---------------------------------------------------------------------------
# pose kinematics blocks
# ---------------------------------------------------------------------------


@_jit
def build_T(q):
    """7x6 matrix T = D C mapping x to the pose rate (wind aside)."""
    T = np.zeros((7, 6))
    T[:3, :3] = rot_b2i(q)
    Qm = quat_rate_matrix(q)
    for i in range(4):
        for j in range(3):
            T[3 + i, 3 + j] = 0.5 * Qm[i, 1 + j]
    return T


@_jit
def build_D(q):
    """7x7 block diagonal of S^T and half the quaternion-rate matrix."""
    D = np.zeros((7, 7))
    D[:3, :3] = rot_b2i(q)
    D[3:, 3:] = 0.5 * quat_rate_matrix(q)
    return D


@_jit
def build_C():
    """Constant 7x6 padding matrix inserting the zero quaternion scalar row."""
    C = np.zeros((7, 6))
    C[0, 0] = 1.0
    C[1, 1] = 1.0
    C[2, 2] = 1.0
    C[4, 3] = 1.0
    C[5, 4] = 1.0
    C[6, 5] = 1.0
    return C


@_jit
def build_B():
    """Constant 7x3 matrix feeding the inertial wind into the pose rate."""
    B = np.zeros((7, 3))
    B[0, 0] = 1.0
    B[1, 1] = 1.0
    B[2, 2] = 1.0
    return B


@_jit
def omega4(omega):
    """4x4 rate matrix for the scalar-first pure quaternion [0, omega]."""
    out = np.zeros((4, 4))
    out[0, 1] = -omega[0]
    out[0, 2] = -omega[1]
    out[0, 3] = -omega[2]
    out[1, 0] = omega[0]
    out[2, 0] = omega[1]
    out[3, 0] = omega[2]
    out[1:, 1:] = -skew3(omega)
    return out


@_jit
def curvature_accel(x, q):
    """The D Omega7 C x term of the pose acceleration (T-dot times x)."""
    va = x[:3]
    w = x[3:]
    out = np.empty(7)
    out[:3] = rot_b2i(q) @ cross3(w, va)
    wsq = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    out[3:] = -0.25 * wsq * q
    return out


@_jit
def pinv_full_column(T):
    """SVD pseudo-inverse of a tall matrix, flagging rank deficiency.

    Returns (pinv, ok); ok is False when the smallest singular value drops
    below RANK_TOLERANCE times the largest.
    """
    U, s, Vt = np.linalg.svd(T)
    ncol = T.shape[1]
    ok = s[ncol - 1] > RANK_TOLERANCE * s[0]
    Vs = np.ascontiguousarray(Vt.T) * (1.0 / s)
    Ut = np.ascontiguousarray(U[:, :ncol].T)
    return Vs @ Ut, ok


# ---------------------------------------------------------------------------
# rigid-body-with-added-mass dynamics
# ---------------------------------------------------------------------------


@_jit
def aero_wrench(x, d_lin, d_quad):
    """Dissipative diagonal damping: -(D_lin + D_quad*|x|) elementwise x."""
    return -(d_lin + d_quad * np.abs(x)) * x


@_jit
def gravity_wrench(q, cg, m, m_w, g_vec):
    """E_g S g: net weight-minus-buoyancy force plus the CG pendulum moment."""
    gb = rot_i2b(q) @ g_vec
    out = np.empty(6)
    out[:3] = m_w * gb
    out[3:] = m * cross3(cg, gb)
    return out


@_jit
def coriolis_wrench(x, M):
    """Omega6 M x with Omega6 = blockdiag(omega-cross, omega-cross)."""
    Mx = M @ x
    w = x[3:]
    out = np.empty(6)
    out[:3] = cross3(w, Mx[:3])
    out[3:] = cross3(w, Mx[3:])
    return out


@_jit
def dynamics_core(x, q, f, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad):
    """x_dot = K x + M^-1 (E_g S g + F_a1 + f) with K = -M^-1 Omega6 M."""
    rhs = (
        -coriolis_wrench(x, M)
        + gravity_wrench(q, cg, m, m_w, g_vec)
        + aero_wrench(x, d_lin, d_quad)
        + f
    )
    return Minv @ rhs


@_jit
def pose_rate_core(x, q, v_w):
    """eta_dot = T x + B v_w."""
    out = np.empty(7)
    out[:3] = rot_b2i(q) @ x[:3] + v_w
    out[3:] = quat_derivative(q, x[3:])
    return out


@_jit
def pose_accel_core(x, xdot, q):
    """eta_ddot = T x_dot + D Omega7 C x."""
    va = x[:3]
    w = x[3:]
    out = np.empty(7)
    out[:3] = rot_b2i(q) @ (xdot[:3] + cross3(w, va))
    wsq = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    out[3:] = quat_derivative(q, xdot[3:]) - 0.25 * wsq * q
    return out


# ---------------------------------------------------------------------------
# control law cores
# ---------------------------------------------------------------------------


@_jit
def smooth_sign_core(sigma, eps):
    """Boundary-layer comparator sigma/(|sigma|+eps); hard sign at eps <= 0."""
    out = np.empty_like(sigma)
    for i in range(sigma.shape[0]):
        s = sigma[i]
        if eps > 0.0:
            out[i] = s / (abs(s) + eps)
        elif s > 0.0:
            out[i] = 1.0
        elif s < 0.0:
            out[i] = -1.0
        else:
            out[i] = 0.0
    return out


@_jit
def switching_gain_core(switch_mode, l1, z1, rho0, ls):
    """Effective per-channel switching gain vector.

    Fixed mode returns the configured diagonal; time-varying mode returns
    max(abs(L1 z1)) + rho0 replicated on every channel, which keeps the
    sliding surface attractive and invariant.
    """
    if switch_mode == SWITCH_FIXED:
        return ls.copy()
    m = 0.0
    for i in range(z1.shape[0]):
        a = abs(l1[i] * z1[i])
        if a > m:
            m = a
    return np.full(z1.shape[0], m + rho0)


@_jit
def control_accel_core(z1, z1dot, z2, k1, l1, l2, ls_eff, eps, flavor):
    """Commanded pose acceleration for the active flavor.

    BSMC keeps every term; BS drops the switching term; SMC drops the
    primary-error feedback L1 z1.
    """
    out = -k1 * z1dot - l2 * z2
    if flavor != FLAVOR_SMC:
        out = out - l1 * z1
    if flavor != FLAVOR_BS:
        out = out - ls_eff * smooth_sign_core(z2, eps)
    return out


@_jit
def control_wrench_core(
    x, q, z1, z1dot, z2, k1, l1, l2, ls_eff, eps, flavor,
    M, Minv, cg, m, m_w, g_vec, d_lin, d_quad,
):
    """Body wrench realizing the commanded acceleration through the model.

    f = M T+ (accel_cmd - D Omega7 C x) - M K x - E_g S g - F_a1
    where -M K x equals +Omega6 M x.  Returns (f, ok); ok is False when the
    pseudo-inverse rank check trips.
    """
    u_acc = control_accel_core(z1, z1dot, z2, k1, l1, l2, ls_eff, eps, flavor)
    T = build_T(q)
    Tp, ok = pinv_full_column(T)
    f = np.zeros(6)
    if not ok:
        return f, False
    v = u_acc - curvature_accel(x, q)
    f = (
        M @ (Tp @ v)
        + coriolis_wrench(x, M)
        - gravity_wrench(q, cg, m, m_w, g_vec)
        - aero_wrench(x, d_lin, d_quad)
    )
    return f, True


@_jit
def lyapunov_core(z1, z2, l1, flavor):
    """Flavor-consistent Lyapunov value (SMC drops the weighted z1 part)."""
    v = 0.0
    for i in range(z2.shape[0]):
        v += 0.5 * z2[i] * z2[i]
    if flavor != FLAVOR_SMC:
        for i in range(z1.shape[0]):
            v += 0.5 * l1[i] * z1[i] * z1[i]
    return v


@_jit
def lyapunov_rate_core(z1, z2, k1, l1, l2, ls_eff, eps, flavor):
    """Closed-form Lyapunov derivative for the active flavor."""
    v = 0.0
    for i in range(z2.shape[0]):
        v -= l2[i] * z2[i] * z2[i]
    if flavor != FLAVOR_SMC:
        for i in range(z1.shape[0]):
            v -= l1[i] * k1[i] * z1[i] * z1[i]
    if flavor != FLAVOR_BS:
        sw = smooth_sign_core(z2, eps)
        for i in range(z2.shape[0]):
            v -= ls_eff[i] * z2[i] * sw[i]
    return v


@_jit
def sigma_sigmadot_core(z1, z2, l1, l2, ls_eff, eps, flavor):
    """Closed-form sigma^T sigma_dot with sigma = z2."""
    v = 0.0
    for i in range(z2.shape[0]):
        v -= l2[i] * z2[i] * z2[i]
    if flavor != FLAVOR_SMC:
        for i in range(z1.shape[0]):
            v -= z2[i] * l1[i] * z1[i]
    if flavor != FLAVOR_BS:
        sw = smooth_sign_core(z2, eps)
        for i in range(z2.shape[0]):
            v -= ls_eff[i] * z2[i] * sw[i]
    return v


# ---------------------------------------------------------------------------
# mission reference (positioning is evaluated in-loop; others precomputed)
# ---------------------------------------------------------------------------


@_jit
def positioning_ref_core(p, q, target, r_tol, wind_hat, fallback_yaw):
    """Quasi-static positioning reference with a virtual circular target.

    Outside the tolerance circle the position reference sits on the circle
    along the bearing line to the vehicle; inside, the horizontal error is
    released (reference tracks the vehicle's own horizontal position).  The
    heading reference points into the estimated wind whenever the wind is
    measurable, else holds fallback_yaw.  The reference rate is zero and the
    quaternion is sign-aligned with the current attitude so the plain
    vector subtraction stays well defined.
    """
    eta_d = np.zeros(7)
    etadot_d = np.zeros(7)
    dN = p[0] - target[0]
    dE = p[1] - target[1]
    dist = math.hypot(dN, dE)
    if dist > r_tol and dist > 0.0:
        scale = r_tol / dist
        eta_d[0] = target[0] + dN * scale
        eta_d[1] = target[1] + dE * scale
    else:
        eta_d[0] = p[0]
        eta_d[1] = p[1]
    eta_d[2] = target[2]

    wspeed = math.hypot(wind_hat[0], wind_hat[1])
    if wspeed > 1e-9:
        yaw = math.atan2(-wind_hat[1], -wind_hat[0])
    else:
        yaw = fallback_yaw
    eta_d[5] = math.sin(0.5 * yaw)
    eta_d[6] = math.cos(0.5 * yaw)
    dot = (
        eta_d[3] * q[0] + eta_d[4] * q[1] + eta_d[5] * q[2] + eta_d[6] * q[3]
    )
    if dot < 0.0:
        eta_d[3:] = -eta_d[3:]
    return eta_d, etadot_d


# ---------------------------------------------------------------------------
# actuator stage and plant integration
# ---------------------------------------------------------------------------


@_jit
def actuator_core(f_cmd, f_prev, dt, sat, tau, actual_mode):
    """Per-axis clamp followed by a first-order lag (actual mode only)."""
    if not actual_mode:
        return f_cmd.copy()
    fc = np.empty(6)
    for i in range(6):
        v = f_cmd[i]
        if v > sat[i]:
            v = sat[i]
        elif v < -sat[i]:
            v = -sat[i]
        fc[i] = v
    if tau <= 0.0:
        return fc
    return f_prev + (dt / tau) * (fc - f_prev)


@_jit
def plant_rk4_step(x, p, q, f, v_w, dt, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad):
    """Classical RK4 step of the joint (x, eta) ODE with f, v_w held.

    The quaternion is renormalized after the step.
    """
    k1x = dynamics_core(x, q, f, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad)
    k1e = pose_rate_core(x, q, v_w)

    x2 = x + 0.5 * dt * k1x
    p2 = p + 0.5 * dt * k1e[:3]
    q2 = q + 0.5 * dt * k1e[3:]
    k2x = dynamics_core(x2, q2, f, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad)
    k2e = pose_rate_core(x2, q2, v_w)

    x3 = x + 0.5 * dt * k2x
    p3 = p + 0.5 * dt * k2e[:3]
    q3 = q + 0.5 * dt * k2e[3:]
    k3x = dynamics_core(x3, q3, f, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad)
    k3e = pose_rate_core(x3, q3, v_w)

    x4 = x + dt * k3x
    p4 = p + dt * k3e[:3]
    q4 = q + dt * k3e[3:]
    k4x = dynamics_core(x4, q4, f, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad)
    k4e = pose_rate_core(x4, q4, v_w)

    xn = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    etadot = (k1e + 2.0 * k2e + 2.0 * k3e + k4e) / 6.0
    pn = p + dt * etadot[:3]
    qn = quat_normalize(q + dt * etadot[3:])
    return xn, pn, qn


# ---------------------------------------------------------------------------
# fused closed-loop kernel
# ---------------------------------------------------------------------------


@_jit
def run_closed_loop(
    n_steps,
    dt,
    # plant
    M, Minv, cg, m, m_w, g_vec, d_lin, d_quad, sat, tau_act,
    actual_mode,
    # gains
    k1, l1, l2, ls, eps, rho0, switch_mode, flavor,
    # mission
    mission_kind, target, r_tol, fallback_yaw, ref_eta, ref_etadot,
    # wind: mean vector before/after the shift step, pre-drawn noise
    wind_mean_a, wind_mean_b, shift_step, turb, est_bias, est_noise,
    # constant unmodeled wrench applied to the plant only
    f_dist,
    # initial state
    x0, p0, q0,
    blowup_limit,
):
    """Single-scenario closed loop: reference, control, actuator, RK4, log.

    Returns (status, bad_step, eta, x, z1, z1dot, z2, f_cmd, f_applied,
    lyapunov, sigma_sigmadot).  status is STATUS_OK, STATUS_BLOWUP or
    STATUS_RANK_DEFICIENT; bad_step indexes the offending step.
    """
    eta_log = np.empty((n_steps, 7))
    x_log = np.empty((n_steps, 6))
    z1_log = np.empty((n_steps, 7))
    z1dot_log = np.empty((n_steps, 7))
    z2_log = np.empty((n_steps, 7))
    fcmd_log = np.empty((n_steps, 6))
    fapp_log = np.empty((n_steps, 6))
    lyap_log = np.empty(n_steps)
    ssd_log = np.empty(n_steps)

    x = x0.copy()
    p = p0.copy()
    q = q0.copy()
    f_prev = np.zeros(6)
    status = STATUS_OK
    bad_step = -1

    for i in range(n_steps):
        if i >= shift_step:
            wm = wind_mean_b
        else:
            wm = wind_mean_a
        v_w = wm + turb[i]
        v_w_hat = wm + est_bias + est_noise[i]

        if mission_kind == MISSION_POSITIONING:
            eta_d, etadot_d = positioning_ref_core(
                p, q, target, r_tol, v_w_hat, fallback_yaw
            )
        else:
            eta_d = ref_eta[i]
            etadot_d = ref_etadot[i]

        eta = np.empty(7)
        eta[:3] = p
        eta[3:] = q
        etadot_m = pose_rate_core(x, q, v_w_hat)

        z1 = eta - eta_d
        z1dot = etadot_m - etadot_d
        z2 = z1dot + k1 * z1
        ls_eff = switching_gain_core(switch_mode, l1, z1, rho0, ls)

        f_cmd, ok = control_wrench_core(
            x, q, z1, z1dot, z2, k1, l1, l2, ls_eff, eps, flavor,
            M, Minv, cg, m, m_w, g_vec, d_lin, d_quad,
        )
        if not ok:
            status = STATUS_RANK_DEFICIENT
            bad_step = i
            break
        f_app = actuator_core(f_cmd, f_prev, dt, sat, tau_act, actual_mode)
        f_prev = f_app

        eta_log[i] = eta
        x_log[i] = x
        z1_log[i] = z1
        z1dot_log[i] = z1dot
        z2_log[i] = z2
        fcmd_log[i] = f_cmd
        fapp_log[i] = f_app
        lyap_log[i] = lyapunov_core(z1, z2, l1, flavor)
        ssd_log[i] = sigma_sigmadot_core(z1, z2, l1, l2, ls_eff, eps, flavor)

        f_tot = f_app + f_dist
        x, p, q = plant_rk4_step(
            x, p, q, f_tot, v_w, dt, M, Minv, cg, m, m_w, g_vec, d_lin, d_quad
        )

        ok_state = True
        for j in range(6):
            if not np.isfinite(x[j]) or abs(x[j]) > blowup_limit:
                ok_state = False
        for j in range(3):
            if not np.isfinite(p[j]) or abs(p[j]) > blowup_limit:
                ok_state = False
        for j in range(4):
            if not np.isfinite(q[j]):
                ok_state = False
        if not ok_state:
            status = STATUS_BLOWUP
            bad_step = i
            break

    return (
        status,
        bad_step,
        eta_log,
        x_log,
        z1_log,
        z1dot_log,
        z2_log,
        fcmd_log,
        fapp_log,
        lyap_log,
        ssd_log,
    )


def warmup():
    """Trigger compilation of the fused kernel (no-op on the numpy backend)."""
    n = 2
    M = np.eye(6)
    run_closed_loop(
        n,
        0.01,
        M,
        M.copy(),
        np.zeros(3),
        1.0,
        0.0,
        np.array([0.0, 0.0, 9.81]),
        np.zeros(6),
        np.zeros(6),
        np.full(6, 1e3),
        0.0,
        False,
        np.full(7, 0.2),
        np.full(7, 0.05),
        np.full(7, 0.5),
        np.full(7, 0.1),
        0.1,
        0.1,
        SWITCH_FIXED,
        FLAVOR_BSMC,
        MISSION_POSITIONING,
        np.zeros(3),
        0.0,
        0.0,
        np.zeros((1, 7)),
        np.zeros((1, 7)),
        np.zeros(3),
        np.zeros(3),
        n + 1,
        np.zeros((n, 3)),
        np.zeros(3),
        np.zeros((n, 3)),
        np.zeros(6),
        np.zeros(6),
        np.zeros(3),
        np.array([0.0, 0.0, 0.0, 1.0]),
        1e6,
    )
