"""6-DOF airship model: rigid-body-with-added-mass dynamics and quaternion
pose kinematics.

Frames and conventions
----------------------
* Inertial frame: North-East-Down (NED); position ``p = [pN, pE, pD]``.
* Body frame: x forward, y right, z down; velocity state
  ``x = [u, v, w, wx, wy, wz]`` is the air-relative linear velocity plus the
  body angular velocity.
* Attitude quaternion: scalar-last ``[qx, qy, qz, qw]``, Hamilton products.
  ``rotation_from_quaternion(q)`` returns S, the inertial-to-body matrix, so
  the ground velocity satisfies ``v = v_a + S v_w`` and ``p_dot = S.T v``.
* Wind is constant in the inertial frame at the model level; time-varying
  turbulence is a simulation-engine concern and enters only through the
  kinematic channel ``eta_dot = T x + B v_w``.

The aerodynamic term is a dissipative diagonal linear-plus-quadratic damping
model, fully configurable through :class:`Fa1Coefficients`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class NonUnitQuaternion(ValueError):
    """Raised when a quaternion argument is not unit-norm within tolerance."""


QUAT_NORM_TOL = 1e-6


def _check_unit_quat(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise NonUnitQuaternion(f"quaternion must have shape (4,), got {q.shape}")
    n = float(np.linalg.norm(q))
    if abs(n - 1.0) > QUAT_NORM_TOL:
        raise NonUnitQuaternion(f"quaternion norm {n} deviates from 1 beyond tolerance")
    return q


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass
class BodyState:
    """Air-velocity state: body-frame linear air velocity and angular rate."""

    v_a: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.v_a = np.asarray(self.v_a, dtype=float).reshape(3)
        self.omega = np.asarray(self.omega, dtype=float).reshape(3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.v_a, self.omega])

    @classmethod
    def from_vector(cls, x) -> "BodyState":
        x = np.asarray(x, dtype=float).reshape(6)
        return cls(x[:3], x[3:])


@dataclass
class Pose:
    """Inertial position plus unit attitude quaternion (scalar-last)."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float).reshape(3)
        self.q = _check_unit_quat(self.q)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.q])

    @classmethod
    def from_vector(cls, eta) -> "Pose":
        eta = np.asarray(eta, dtype=float).reshape(7)
        return cls(eta[:3], eta[3:])


@dataclass
class Wrench:
    """Body-frame force and moment."""

    force: np.ndarray
    moment: np.ndarray

    def __post_init__(self):
        self.force = np.asarray(self.force, dtype=float).reshape(3)
        self.moment = np.asarray(self.moment, dtype=float).reshape(3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.force, self.moment])

    @classmethod
    def from_vector(cls, f) -> "Wrench":
        f = np.asarray(f, dtype=float).reshape(6)
        return cls(f[:3], f[3:])


@dataclass(frozen=True)
class Fa1Coefficients:
    """Diagonal damping: F_a1 = -(lin + quad * |x|) * x elementwise."""

    lin: np.ndarray
    quad: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lin", np.asarray(self.lin, dtype=float).reshape(6))
        object.__setattr__(self, "quad", np.asarray(self.quad, dtype=float).reshape(6))
        if np.any(self.lin < 0) or np.any(self.quad < 0):
            raise ValueError("aero damping coefficients must be >= 0 (dissipative)")

    def to_dict(self) -> dict:
        return {"lin": self.lin.tolist(), "quad": self.quad.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Fa1Coefficients":
        return cls(d["lin"], d["quad"])


@dataclass(frozen=True)
class AirshipParams:
    """Physical parameters of the vehicle and its actuation limits.

    M is the 6x6 generalized mass/inertia (rigid plus added mass), c the CG
    offset in the body frame, m the vehicle mass, m_w the weighting mass
    (weight minus buoyancy), g the inertial gravity vector, sat the per-axis
    wrench saturation limits and tau_act the actuator time constant.
    """

    M: np.ndarray
    c: np.ndarray
    m: float
    m_w: float
    g: np.ndarray
    aero: Fa1Coefficients
    sat: np.ndarray
    tau_act: float

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float).reshape(6, 6)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).reshape(3))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float).reshape(3))
        object.__setattr__(self, "sat", np.asarray(self.sat, dtype=float).reshape(6))
        if not np.allclose(M, M.T, atol=1e-9):
            raise ValueError("mass matrix M must be symmetric")
        eigvals = np.linalg.eigvalsh(M)
        if np.any(eigvals <= 0):
            raise ValueError("mass matrix M must be positive definite")
        if np.any(self.sat <= 0):
            raise ValueError("sat entries must be > 0")
        if self.tau_act < 0:
            raise ValueError("tau_act must be >= 0")
        object.__setattr__(self, "_Minv", np.linalg.inv(M))

    @property
    def M_inv(self) -> np.ndarray:
        return self._Minv

    def to_dict(self) -> dict:
        return {
            "M": self.M.tolist(),
            "c": self.c.tolist(),
            "m": self.m,
            "m_w": self.m_w,
            "g": self.g.tolist(),
            "aero": self.aero.to_dict(),
            "sat": self.sat.tolist(),
            "tau_act": self.tau_act,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AirshipParams":
        return cls(
            M=d["M"],
            c=d["c"],
            m=float(d["m"]),
            m_w=float(d["m_w"]),
            g=d["g"],
            aero=Fa1Coefficients.from_dict(d["aero"]),
            sat=d["sat"],
            tau_act=float(d["tau_act"]),
        )

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def from_json(cls, path) -> "AirshipParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def default_params() -> AirshipParams:
    """Desk-scale stand-in vehicle: 50 kg, 11 m x 2.55 m ellipsoid hull.

    Rotational inertia uses the uniform solid-ellipsoid formula and a 20%
    added-mass margin on the diagonal rigid terms.  These are configurable
    stand-ins, not measured data.
    """
    m = 50.0
    a, b = 5.5, 1.275  # semi-axes of the hull ellipsoid
    ixx = m * (b * b + b * b) / 5.0
    iyy = m * (a * a + b * b) / 5.0
    added = 1.2
    c = np.array([0.0, 0.0, 0.5])
    M = np.zeros((6, 6))
    M[:3, :3] = added * m * np.eye(3)
    M[3:, 3:] = added * np.diag([ixx, iyy, iyy])
    M[:3, 3:] = -m * kernels.skew3(c)
    M[3:, :3] = m * kernels.skew3(c)
    return AirshipParams(
        M=M,
        c=c,
        m=m,
        m_w=1.0,
        g=np.array([0.0, 0.0, 9.80665]),
        aero=Fa1Coefficients(
            lin=[4.0, 5.0, 10.0, 3.0, 15.0, 15.0],
            quad=[1.5, 2.0, 5.0, 1.0, 10.0, 10.0],
        ),
        sat=[150.0, 30.0, 35.0, 10.0, 90.0, 90.0],
        tau_act=0.5,
    )


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def skew(v) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == cross(v, w)."""
    return kernels.skew3(np.asarray(v, dtype=float).reshape(3))


def rotation_from_quaternion(q) -> np.ndarray:
    """S in SO(3) mapping inertial-frame vectors to the body frame."""
    return kernels.rot_i2b(_check_unit_quat(q))


def quaternion_rate(q, omega) -> np.ndarray:
    """q_dot = 0.5 Q [0; omega]; tangent to the unit sphere (q . q_dot = 0)."""
    q = _check_unit_quat(q)
    omega = np.asarray(omega, dtype=float).reshape(3)
    return kernels.quat_derivative(q, omega)


def quat_from_euler(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Scalar-last quaternion from intrinsic ZYX (yaw-pitch-roll) angles."""
    cy, sy = math.cos(0.5 * yaw), math.sin(0.5 * yaw)
    cp, sp = math.cos(0.5 * pitch), math.sin(0.5 * pitch)
    cr, sr = math.cos(0.5 * roll), math.sin(0.5 * roll)
    return np.array(
        [
            cy * cp * sr - sy * sp * cr,
            cy * sp * cr + sy * cp * sr,
            sy * cp * cr - cy * sp * sr,
            cy * cp * cr + sy * sp * sr,
        ]
    )


def yaw_quat(psi: float) -> np.ndarray:
    """Pure-yaw quaternion (level flight heading psi)."""
    return kernels.yaw_quat(float(psi))


def build_T(q) -> np.ndarray:
    """7x6 matrix T = D C with eta_dot = T x + B v_w."""
    return kernels.build_T(_check_unit_quat(q))


def build_D(q) -> np.ndarray:
    """7x7 block diagonal of S^T (top-left) and Q/2 (bottom-right)."""
    return kernels.build_D(_check_unit_quat(q))


def build_C() -> np.ndarray:
    """Constant 7x6 dimension-matching matrix."""
    return kernels.build_C()


def build_B() -> np.ndarray:
    """Constant 7x3 wind input matrix [I3; 0]."""
    return kernels.build_B()


def omega7(omega) -> np.ndarray:
    """7x7 rate matrix diag(omega-cross, Omega4/2) of the pose acceleration."""
    omega = np.asarray(omega, dtype=float).reshape(3)
    out = np.zeros((7, 7))
    out[:3, :3] = kernels.skew3(omega)
    out[3:, 3:] = 0.5 * kernels.omega4(omega)
    return out


def aero_force(x, params: AirshipParams) -> np.ndarray:
    """Dissipative aerodynamic wrench F_a1(x); zero at rest."""
    x = np.asarray(x, dtype=float).reshape(6)
    return kernels.aero_wrench(x, params.aero.lin, params.aero.quad)


def dynamics(x, eta, f, params: AirshipParams) -> np.ndarray:
    """x_dot = K x + M^-1 (E_g S g + F_a1 + f), K = -M^-1 Omega6 M."""
    x = np.asarray(x, dtype=float).reshape(6)
    eta = np.asarray(eta, dtype=float).reshape(7)
    f = np.asarray(f, dtype=float).reshape(6)
    q = _check_unit_quat(eta[3:])
    return kernels.dynamics_core(
        x, q, f, params.M, params.M_inv, params.c, params.m, params.m_w,
        params.g, params.aero.lin, params.aero.quad,
    )


def pose_rate(x, eta, v_w) -> np.ndarray:
    """eta_dot = T x + B v_w."""
    x = np.asarray(x, dtype=float).reshape(6)
    eta = np.asarray(eta, dtype=float).reshape(7)
    v_w = np.asarray(v_w, dtype=float).reshape(3)
    q = _check_unit_quat(eta[3:])
    return kernels.pose_rate_core(x, q, v_w)


def pose_accel(x, xdot, eta) -> np.ndarray:
    """eta_ddot = T x_dot + D Omega7 C x."""
    x = np.asarray(x, dtype=float).reshape(6)
    xdot = np.asarray(xdot, dtype=float).reshape(6)
    eta = np.asarray(eta, dtype=float).reshape(7)
    q = _check_unit_quat(eta[3:])
    return kernels.pose_accel_core(x, xdot, q)
