"""Reference generation for the three mission types.

* Positioning: constant target with a virtual circular tolerance region;
  heading points into the estimated wind (one-degree freedom in the final
  position).  The reference rate is zero; the position reference is
  quasi-static (recomputed from the vehicle position each step).
* Path tracking: vertical takeoff, constant-groundspeed ellipse at cruise
  altitude with a smooth mid-mission altitude excursion, vertical landing.
* Velocity tracking: rectilinear reference at a constant ground velocity.

All references return (eta_d, eta_d_dot) 7-vectors; quaternion channels are
unit norm and kept continuous in time so the component-wise error stays well
behaved.  Segment joints of the path mission are declared in
``PathMission.joint_times``; eta_d is C1 inside segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import kernels
from .model import quaternion_rate, yaw_quat


class OutOfScheduleTime(ValueError):
    """Raised when a path mission is sampled past its end time."""


def _align_hemisphere(eta_d: np.ndarray, q_ref: np.ndarray) -> np.ndarray:
    if float(eta_d[3:] @ q_ref) < 0.0:
        eta_d = eta_d.copy()
        eta_d[3:] = -eta_d[3:]
    return eta_d


# ---------------------------------------------------------------------------
# positioning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PositioningMission:
    """Hover at a fixed target with a virtual circular tolerance region."""

    target: np.ndarray
    tolerance_radius: float = 2.5
    fallback_yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "target", np.asarray(self.target, dtype=float).reshape(3)
        )
        if self.tolerance_radius < 0:
            raise ValueError("tolerance_radius must be >= 0")

    kind = "positioning"

    def sample(self, t: float, pose=None, wind_hat=None):
        if pose is None:
            raise ValueError("positioning reference needs the current pose")
        pose = np.asarray(pose, dtype=float).reshape(7)
        if wind_hat is None:
            wind_hat = np.zeros(3)
        return kernels.positioning_ref_core(
            pose[:3], pose[3:], self.target, self.tolerance_radius,
            np.asarray(wind_hat, dtype=float).reshape(3), self.fallback_yaw,
        )

    def to_dict(self) -> dict:
        return {
            "kind": "positioning",
            "target": self.target.tolist(),
            "tolerance_radius": self.tolerance_radius,
            "fallback_yaw": self.fallback_yaw,
        }


def positioning_reference(target_p, tolerance_radius, current_pose, wind_dir=None):
    """(eta_d, eta_d_dot) of the virtual-circle positioning reference.

    wind_dir is the estimated inertial wind vector; the desired heading
    points into it.  Inside the tolerance circle the horizontal position
    error is released (nearest point of the circle interior).
    """
    mission = PositioningMission(target=target_p, tolerance_radius=tolerance_radius)
    return mission.sample(0.0, pose=current_pose, wind_hat=wind_dir)


# ---------------------------------------------------------------------------
# velocity tracking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VelocityMission:
    """Rectilinear reference at constant body-frame ground velocity v_d."""

    v_d: np.ndarray
    heading: float = 0.0
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "v_d", np.asarray(self.v_d, dtype=float).reshape(3))
        object.__setattr__(
            self, "origin", np.asarray(self.origin, dtype=float).reshape(3)
        )

    kind = "velocity"

    def _eta0(self) -> np.ndarray:
        return np.concatenate([self.origin, yaw_quat(self.heading)])

    def rate(self) -> np.ndarray:
        """eta_d_dot = T(q_d) x_d with x_d = [v_d; 0]."""
        q_d = yaw_quat(self.heading)
        x_d = np.concatenate([self.v_d, np.zeros(3)])
        return kernels.pose_rate_core(x_d, q_d, np.zeros(3))

    def sample(self, t: float, pose=None, wind_hat=None):
        eta_dot = self.rate()
        eta_d = self._eta0() + eta_dot * t
        return eta_d, eta_dot

    def to_dict(self) -> dict:
        return {
            "kind": "velocity",
            "v_d": self.v_d.tolist(),
            "heading": self.heading,
            "origin": self.origin.tolist(),
        }


def velocity_reference(v_d, initial_pose, heading: float = 0.0) -> VelocityMission:
    initial_pose = np.asarray(initial_pose, dtype=float).reshape(7)
    return VelocityMission(v_d=v_d, heading=heading, origin=initial_pose[:3])


# ---------------------------------------------------------------------------
# path tracking: takeoff / ellipse cruise / landing
# ---------------------------------------------------------------------------


def _smoothstep(u: float) -> float:
    u = min(1.0, max(0.0, u))
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_rate(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return 6.0 * u * (1.0 - u)


@dataclass(frozen=True)
class PathMission:
    """3D mission: vertical takeoff, ellipse cruise, altitude shift, landing.

    The ellipse is traversed at constant groundspeed (outside the speed
    ramps); the parameter schedule theta(t) is integrated at construction
    and stored as a cubic Hermite spline with analytic knot derivatives, so
    eta_d_dot is consistent with eta_d to interpolation accuracy.  Heading
    follows the path tangent; pitch and roll references are zero.
    """

    semi_major: float = 120.0
    semi_minor: float = 60.0
    cruise_alt: float = 50.0
    cruise_speed: float = 5.0
    takeoff_duration: float = 50.0
    landing_duration: float = 50.0
    speed_ramp: float = 10.0
    laps: float = 2.0
    shift_amount: float = 15.0
    shift_start: float = 150.0
    shift_ramp: float = 15.0
    shift_hold: float = 20.0
    origin: np.ndarray = field(default_factory=lambda: np.zeros(2))
    _theta: CubicHermiteSpline = field(init=False, repr=False, compare=False, default=None)
    _theta_d: CubicHermiteSpline = field(init=False, repr=False, compare=False, default=None)
    _psi: CubicHermiteSpline = field(init=False, repr=False, compare=False, default=None)
    _psi_d: CubicHermiteSpline = field(init=False, repr=False, compare=False, default=None)
    cruise_duration: float = field(init=False, default=0.0)

    kind = "path"

    def __post_init__(self):
        if min(self.semi_major, self.semi_minor, self.cruise_speed) <= 0:
            raise ValueError("ellipse axes and cruise speed must be > 0")
        object.__setattr__(
            self, "origin", np.asarray(self.origin, dtype=float).reshape(2)
        )
        self._build_schedule()

    # -- schedule construction -------------------------------------------

    def _arc_rate(self, theta: float) -> float:
        """ds/dtheta of the ellipse point (a cos, b sin)."""
        a, b = self.semi_major, self.semi_minor
        return math.hypot(a * math.sin(theta), b * math.cos(theta))

    def _speed(self, tc: float) -> float:
        """Groundspeed profile over cruise-local time (ramp up and down)."""
        v = self.cruise_speed
        ramp = self.speed_ramp
        out = v
        if tc < ramp:
            out = v * _smoothstep(tc / ramp)
        tail = self.cruise_duration - tc
        if tail < ramp:
            out = min(out, v * _smoothstep(tail / ramp))
        return out

    def _build_schedule(self):
        # total arc length for the requested laps, integrated by Simpson
        a, b = self.semi_major, self.semi_minor
        thetas = np.linspace(0.0, 2.0 * math.pi, 20001)
        rates = np.hypot(a * np.sin(thetas), b * np.cos(thetas))
        perimeter = float(np.trapezoid(rates, thetas))
        arc_total = perimeter * self.laps
        # cruise duration: ramps replace full-speed travel at both ends
        ramp_loss = self.speed_ramp * (1.0 - 0.5)  # smoothstep mean is 1/2
        duration = arc_total / self.cruise_speed + 2.0 * ramp_loss
        object.__setattr__(self, "cruise_duration", duration)

        dt = 0.02
        n = int(math.ceil(duration / dt)) + 1
        t_knots = np.linspace(0.0, duration, n)
        theta = np.empty(n)
        theta_dot = np.empty(n)
        th = 0.0
        for i, tk in enumerate(t_knots):
            theta[i] = th
            theta_dot[i] = self._speed(tk) / self._arc_rate(th)
            if i + 1 < n:
                h = t_knots[i + 1] - tk
                k1 = self._speed(tk) / self._arc_rate(th)
                k2 = self._speed(tk + 0.5 * h) / self._arc_rate(th + 0.5 * h * k1)
                k3 = self._speed(tk + 0.5 * h) / self._arc_rate(th + 0.5 * h * k2)
                k4 = self._speed(tk + h) / self._arc_rate(th + h * k3)
                th += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        theta_spl = CubicHermiteSpline(t_knots, theta, theta_dot)
        object.__setattr__(self, "_theta", theta_spl)
        object.__setattr__(self, "_theta_d", theta_spl.derivative())

        psi = np.unwrap(
            np.arctan2(b * np.cos(theta), -a * np.sin(theta))
        )
        # psi_dot = d/dtheta atan2(b cos, -a sin) * theta_dot
        dpsi_dtheta = (a * b) / (
            (a * np.sin(theta)) ** 2 + (b * np.cos(theta)) ** 2
        )
        psi_spl = CubicHermiteSpline(t_knots, psi, dpsi_dtheta * theta_dot)
        object.__setattr__(self, "_psi", psi_spl)
        object.__setattr__(self, "_psi_d", psi_spl.derivative())

    # -- segment bookkeeping ----------------------------------------------

    @property
    def cruise_start(self) -> float:
        return self.takeoff_duration

    @property
    def cruise_end(self) -> float:
        return self.takeoff_duration + self.cruise_duration

    @property
    def duration(self) -> float:
        return self.cruise_end + self.landing_duration

    @property
    def joint_times(self) -> tuple:
        s0, s1 = self.shift_start, self.shift_start + self.shift_ramp
        s2 = s1 + self.shift_hold
        s3 = s2 + self.shift_ramp
        return (self.cruise_start, s0, s1, s2, s3, self.cruise_end)

    # -- profiles ----------------------------------------------------------

    def _altitude(self, t: float):
        """(h, h_dot): takeoff and landing smoothsteps plus the mid shift."""
        h = self.cruise_alt
        hd = 0.0
        if t < self.cruise_start:
            u = t / self.takeoff_duration
            h = self.cruise_alt * _smoothstep(u)
            hd = self.cruise_alt * _smoothstep_rate(u) / self.takeoff_duration
            return h, hd
        if t > self.cruise_end:
            u = (t - self.cruise_end) / self.landing_duration
            h = self.cruise_alt * (1.0 - _smoothstep(u))
            hd = -self.cruise_alt * _smoothstep_rate(u) / self.landing_duration
            return h, hd
        s0, s1, s2, s3 = self.joint_times[1:5]
        if s0 <= t < s1:
            u = (t - s0) / self.shift_ramp
            h += self.shift_amount * _smoothstep(u)
            hd = self.shift_amount * _smoothstep_rate(u) / self.shift_ramp
        elif s1 <= t < s2:
            h += self.shift_amount
        elif s2 <= t < s3:
            u = (t - s2) / self.shift_ramp
            h += self.shift_amount * (1.0 - _smoothstep(u))
            hd = -self.shift_amount * _smoothstep_rate(u) / self.shift_ramp
        return h, hd

    def _horizontal(self, t: float):
        """(pN, pE, vN, vE, psi, psi_dot) of the cruise ellipse."""
        a, b = self.semi_major, self.semi_minor
        cN = self.origin[0] - a
        cE = self.origin[1]
        if t <= self.cruise_start:
            tc = 0.0
        elif t >= self.cruise_end:
            tc = self.cruise_duration
        else:
            tc = t - self.cruise_start
        th = float(self._theta(tc))
        thd = float(self._theta_d(tc)) if 0.0 < tc < self.cruise_duration else 0.0
        pN = cN + a * math.cos(th)
        pE = cE + b * math.sin(th)
        vN = -a * math.sin(th) * thd
        vE = b * math.cos(th) * thd
        psi = float(self._psi(tc))
        psid = float(self._psi_d(tc)) if 0.0 < tc < self.cruise_duration else 0.0
        return pN, pE, vN, vE, psi, psid

    def sample(self, t: float, pose=None, wind_hat=None):
        if t < 0.0 or t > self.duration + 1e-9:
            raise OutOfScheduleTime(
                f"t={t} outside the mission schedule [0, {self.duration}]"
            )
        pN, pE, vN, vE, psi, psid = self._horizontal(t)
        h, hd = self._altitude(t)
        q_d = yaw_quat(psi)
        q_d_dot = quaternion_rate(q_d, np.array([0.0, 0.0, psid]))
        eta_d = np.array([pN, pE, -h, q_d[0], q_d[1], q_d[2], q_d[3]])
        eta_d_dot = np.concatenate([[vN, vE, -hd], q_d_dot])
        return eta_d, eta_d_dot

    def to_dict(self) -> dict:
        return {
            "kind": "path",
            "semi_major": self.semi_major,
            "semi_minor": self.semi_minor,
            "cruise_alt": self.cruise_alt,
            "cruise_speed": self.cruise_speed,
            "takeoff_duration": self.takeoff_duration,
            "landing_duration": self.landing_duration,
            "speed_ramp": self.speed_ramp,
            "laps": self.laps,
            "shift_amount": self.shift_amount,
            "shift_start": self.shift_start,
            "shift_ramp": self.shift_ramp,
            "shift_hold": self.shift_hold,
            "origin": self.origin.tolist(),
        }


def path_reference(t: float, mission: Optional[PathMission] = None):
    """(eta_d, eta_d_dot) of the bundled 3D mission at time t."""
    if mission is None:
        mission = PathMission()
    return mission.sample(t)


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def mission_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "positioning":
        return PositioningMission(
            target=d["target"],
            tolerance_radius=float(d.get("tolerance_radius", 2.5)),
            fallback_yaw=float(d.get("fallback_yaw", 0.0)),
        )
    if kind == "velocity":
        return VelocityMission(
            v_d=d["v_d"],
            heading=float(d.get("heading", 0.0)),
            origin=d.get("origin", [0.0, 0.0, 0.0]),
        )
    if kind == "path":
        kw = {k: v for k, v in d.items() if k != "kind"}
        return PathMission(**kw)
    raise ValueError(f"unknown mission kind: {kind!r}")


def precompute_reference(mission, t_grid: np.ndarray, q0: np.ndarray):
    """Tabulate (eta_d, eta_d_dot) on the step grid for time-only missions.

    Quaternion rows are hemisphere-aligned with the initial attitude and
    kept continuous across rows.
    """
    n = len(t_grid)
    ref_eta = np.empty((n, 7))
    ref_etadot = np.empty((n, 7))
    q_prev = np.asarray(q0, dtype=float).reshape(4)
    for i, t in enumerate(t_grid):
        eta_d, eta_d_dot = mission.sample(float(t))
        eta_d = np.asarray(eta_d, dtype=float)
        eta_d_dot = np.asarray(eta_d_dot, dtype=float)
        if float(eta_d[3:] @ q_prev) < 0.0:
            eta_d = eta_d.copy()
            eta_d_dot = eta_d_dot.copy()
            eta_d[3:] = -eta_d[3:]
            eta_d_dot[3:] = -eta_d_dot[3:]
        ref_eta[i] = eta_d
        ref_etadot[i] = eta_d_dot
        q_prev = eta_d[3:]
    return ref_eta, ref_etadot
