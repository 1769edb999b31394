"""Deterministic closed-loop simulation engine.

A scenario couples the airship model, one controller flavor and a mission
into a fixed-step RK4 loop with optional actuator saturation and first-order
lag ("actual" mode), constant-mean wind plus white per-step turbulence, and
uniform time-series logging.

Determinism: all randomness is pre-drawn from a named generator (PCG64)
before the loop, so a given (config, seed) pair reproduces byte-identical
CSV logs under a fixed backend.  The numba and numpy backends agree to
floating-point accumulation error (see tests), not bitwise.

The wind estimate fed to the controller is the constant mean wind plus a
configurable bias and noise; turbulence is never visible to the controller,
mirroring a smoothing estimator.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .control import GainSet, RankDeficientT, default_gains
from .missions import (
    PathMission,
    PositioningMission,
    VelocityMission,
    mission_from_dict,
    precompute_reference,
)
from .model import AirshipParams, default_params, quat_from_euler

RNG_ALGORITHM = "pcg64"


class ConfigError(ValueError):
    """Raised when a scenario config fails validation; names the field."""


class NumericalBlowup(RuntimeError):
    """Raised when a state entry exceeds the configured bound mid-run."""

    def __init__(self, step: int, message: Optional[str] = None):
        self.step = step
        super().__init__(message or f"state magnitude bound exceeded at step {step}")


def wind_mean_vector(speed: float, incidence_deg: float) -> np.ndarray:
    """Inertial mean wind for a given speed and incidence.

    Incidence is the bearing the wind blows FROM, measured from North, so
    speed 2 at 90 deg gives (0, -2, 0): wind out of the East.
    """
    a = math.radians(incidence_deg)
    return -speed * np.array([math.cos(a), math.sin(a), 0.0])


@dataclass(frozen=True)
class WindConfig:
    speed: float = 0.0
    incidence_deg: float = 0.0
    turbulence_std: float = 0.0
    shift_time: Optional[float] = None
    shift_incidence_deg: Optional[float] = None
    shift_speed: Optional[float] = None

    def __post_init__(self):
        if self.speed < 0:
            raise ConfigError("wind.speed must be >= 0")
        if self.turbulence_std < 0:
            raise ConfigError("wind.turbulence_std must be >= 0")

    def mean_before(self) -> np.ndarray:
        return wind_mean_vector(self.speed, self.incidence_deg)

    def mean_after(self) -> np.ndarray:
        if self.shift_time is None:
            return self.mean_before()
        speed = self.speed if self.shift_speed is None else self.shift_speed
        inc = (
            self.incidence_deg
            if self.shift_incidence_deg is None
            else self.shift_incidence_deg
        )
        return wind_mean_vector(speed, inc)

    def to_dict(self) -> dict:
        return {
            "speed": self.speed,
            "incidence_deg": self.incidence_deg,
            "turbulence_std": self.turbulence_std,
            "shift_time": self.shift_time,
            "shift_incidence_deg": self.shift_incidence_deg,
            "shift_speed": self.shift_speed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WindConfig":
        return cls(
            speed=float(d.get("speed", 0.0)),
            incidence_deg=float(d.get("incidence_deg", 0.0)),
            turbulence_std=float(d.get("turbulence_std", 0.0)),
            shift_time=d.get("shift_time"),
            shift_incidence_deg=d.get("shift_incidence_deg"),
            shift_speed=d.get("shift_speed"),
        )


@dataclass(frozen=True)
class WindEstimateConfig:
    """Estimator model: truth (mean wind) plus constant bias and white noise."""

    bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    noise_std: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "bias", np.asarray(self.bias, dtype=float).reshape(3))
        if self.noise_std < 0:
            raise ConfigError("wind_estimate.noise_std must be >= 0")

    def to_dict(self) -> dict:
        return {"bias": self.bias.tolist(), "noise_std": self.noise_std}

    @classmethod
    def from_dict(cls, d: dict) -> "WindEstimateConfig":
        return cls(bias=d.get("bias", [0.0, 0.0, 0.0]), noise_std=float(d.get("noise_std", 0.0)))


@dataclass(frozen=True)
class InitialState:
    p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw_deg: float = 0.0
    pitch_deg: float = 0.0
    roll_deg: float = 0.0
    v_a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))
        object.__setattr__(self, "v_a", np.asarray(self.v_a, dtype=float).reshape(3))
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float).reshape(3))

    def quaternion(self) -> np.ndarray:
        return quat_from_euler(
            math.radians(self.yaw_deg),
            math.radians(self.pitch_deg),
            math.radians(self.roll_deg),
        )

    def body_state(self) -> np.ndarray:
        return np.concatenate([self.v_a, self.omega])

    def to_dict(self) -> dict:
        return {
            "p": self.p.tolist(),
            "yaw_deg": self.yaw_deg,
            "pitch_deg": self.pitch_deg,
            "roll_deg": self.roll_deg,
            "v_a": self.v_a.tolist(),
            "omega": self.omega.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InitialState":
        return cls(
            p=d.get("p", [0.0, 0.0, 0.0]),
            yaw_deg=float(d.get("yaw_deg", 0.0)),
            pitch_deg=float(d.get("pitch_deg", 0.0)),
            roll_deg=float(d.get("roll_deg", 0.0)),
            v_a=d.get("v_a", [0.0, 0.0, 0.0]),
            omega=d.get("omega", [0.0, 0.0, 0.0]),
        )


MODES = ("ideal", "actual")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a closed-loop run needs; JSON round-trippable."""

    mission: object
    gains: GainSet
    params: AirshipParams
    name: str = "scenario"
    dt: float = 0.01
    t_end: float = 60.0
    mode: str = "ideal"
    seed: int = 0
    wind: WindConfig = field(default_factory=WindConfig)
    wind_estimate: WindEstimateConfig = field(default_factory=WindEstimateConfig)
    initial: InitialState = field(default_factory=InitialState)
    # constant unmodeled body wrench on the plant (the controller never sees
    # it); stands in for the aero/buoyancy model mismatch a real vehicle has
    disturbance: np.ndarray = field(default_factory=lambda: np.zeros(6))
    blowup_limit: float = 1e6

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be > 0")
        if self.t_end < self.dt:
            raise ConfigError("t_end must be >= dt")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        object.__setattr__(
            self, "disturbance", np.asarray(self.disturbance, dtype=float).reshape(6)
        )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def replace(self, **kw) -> "ScenarioConfig":
        fields = {
            "mission": self.mission,
            "gains": self.gains,
            "params": self.params,
            "name": self.name,
            "dt": self.dt,
            "t_end": self.t_end,
            "mode": self.mode,
            "seed": self.seed,
            "wind": self.wind,
            "wind_estimate": self.wind_estimate,
            "initial": self.initial,
            "disturbance": self.disturbance,
            "blowup_limit": self.blowup_limit,
        }
        fields.update(kw)
        return ScenarioConfig(**fields)

    def to_dict(self) -> dict:
        return {
            "kind": "airship",
            "name": self.name,
            "dt": self.dt,
            "t_end": self.t_end,
            "mode": self.mode,
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
            "wind": self.wind.to_dict(),
            "wind_estimate": self.wind_estimate.to_dict(),
            "initial": self.initial.to_dict(),
            "mission": self.mission.to_dict(),
            "gains": self.gains.to_dict(),
            "params": self.params.to_dict(),
            "disturbance": self.disturbance.tolist(),
            "blowup_limit": self.blowup_limit,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        try:
            mission = mission_from_dict(d["mission"])
        except KeyError as e:
            raise ConfigError(f"missing config field: {e.args[0]}") from e
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad mission config: {e}") from e
        gains = d.get("gains")
        params = d.get("params")
        try:
            return cls(
                mission=mission,
                gains=default_gains() if gains is None else GainSet.from_dict(gains),
                params=default_params() if params is None else AirshipParams.from_dict(params),
                name=d.get("name", "scenario"),
                dt=float(d.get("dt", 0.01)),
                t_end=float(d.get("t_end", 60.0)),
                mode=d.get("mode", "ideal"),
                seed=int(d.get("seed", 0)),
                wind=WindConfig.from_dict(d.get("wind", {})),
                wind_estimate=WindEstimateConfig.from_dict(d.get("wind_estimate", {})),
                initial=InitialState.from_dict(d.get("initial", {})),
                disturbance=d.get("disturbance", [0.0] * 6),
                blowup_limit=float(d.get("blowup_limit", 1e6)),
            )
        except KeyError as e:
            raise ConfigError(f"missing config field: {e.args[0]}") from e
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e)) from e

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigError(f"invalid JSON in {path}: {e}") from e
        return cls.from_dict(d)

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


# ---------------------------------------------------------------------------
# time-series log
# ---------------------------------------------------------------------------

LOG_COLUMNS = (
    ["t"]
    + ["pN", "pE", "pD", "qx", "qy", "qz", "qw"]
    + ["u", "v", "w", "wx", "wy", "wz"]
    + [f"z1_{i}" for i in range(7)]
    + [f"z1d_{i}" for i in range(7)]
    + [f"z2_{i}" for i in range(7)]
    + ["fcmd_Fx", "fcmd_Fy", "fcmd_Fz", "fcmd_Mx", "fcmd_My", "fcmd_Mz"]
    + ["fapp_Fx", "fapp_Fy", "fapp_Fz", "fapp_Mx", "fapp_My", "fapp_Mz"]
    + ["lyapunov", "sigma_sigmadot"]
)


@dataclass
class TimeSeriesLog:
    """Per-step records of one closed-loop run (uniform time grid)."""

    t: np.ndarray
    eta: np.ndarray
    x: np.ndarray
    z1: np.ndarray
    z1_dot: np.ndarray
    z2: np.ndarray
    f_cmd: np.ndarray
    f_applied: np.ndarray
    lyapunov: np.ndarray
    sigma_sigmadot: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    def as_table(self) -> np.ndarray:
        return np.column_stack(
            [
                self.t,
                self.eta,
                self.x,
                self.z1,
                self.z1_dot,
                self.z2,
                self.f_cmd,
                self.f_applied,
                self.lyapunov,
                self.sigma_sigmadot,
            ]
        )

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        buf.write(",".join(LOG_COLUMNS) + "\n")
        for row in self.as_table():
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        return buf.getvalue().encode()

    def content_hash(self) -> str:
        return "sha256:" + hashlib.sha256(self.to_csv_bytes()).hexdigest()

    def save(self, directory, stem: str) -> dict:
        """Write <stem>_log.csv plus a JSON metadata sidecar; returns paths."""
        import os

        os.makedirs(directory, exist_ok=True)
        csv_path = os.path.join(directory, f"{stem}_log.csv")
        data = self.to_csv_bytes()
        with open(csv_path, "wb") as fh:
            fh.write(data)
        sidecar = {
            "columns": LOG_COLUMNS,
            "csv_sha256": "sha256:" + hashlib.sha256(data).hexdigest(),
            **self.meta,
        }
        meta_path = os.path.join(directory, f"{stem}_log.meta.json")
        with open(meta_path, "w") as fh:
            json.dump(sidecar, fh, indent=2)
        return {"csv": csv_path, "meta": meta_path}


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def rk4_step(f, y, t: float, dt: float) -> np.ndarray:
    """One classical RK4 step of y' = f(t, y)."""
    y = np.asarray(y, dtype=float)
    k1 = np.asarray(f(t, y))
    k2 = np.asarray(f(t + 0.5 * dt, y + 0.5 * dt * k1))
    k3 = np.asarray(f(t + 0.5 * dt, y + 0.5 * dt * k2))
    k4 = np.asarray(f(t + dt, y + dt * k3))
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def actuator_stage(f_cmd, f_prev, dt: float, params: AirshipParams, mode: str):
    """Per-axis clamp then first-order lag; ideal mode passes through."""
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    f_cmd = np.asarray(f_cmd, dtype=float).reshape(6)
    f_prev = np.asarray(f_prev, dtype=float).reshape(6)
    return kernels.actuator_core(
        f_cmd, f_prev, float(dt), params.sat, params.tau_act, mode == "actual"
    )


def wind_sample(wind: WindConfig, rng: np.random.Generator, t: float = 0.0) -> np.ndarray:
    """One draw of the inertial wind: mean plus white Gaussian turbulence."""
    if wind.shift_time is not None and t >= wind.shift_time:
        mean = wind.mean_after()
    else:
        mean = wind.mean_before()
    if wind.turbulence_std == 0.0:
        return mean + np.zeros(3)
    return mean + wind.turbulence_std * rng.standard_normal(3)


def run_scenario(cfg: ScenarioConfig) -> TimeSeriesLog:
    """Execute the configured closed loop and return its log.

    Loop order per step: wind sample, mission reference, tracking errors,
    control wrench, actuator stage, RK4 plant step, log.  Raises
    NumericalBlowup (with the offending step) or RankDeficientT on failure.
    """
    n = cfg.n_steps
    dt = cfg.dt
    params = cfg.params
    gains = cfg.gains
    q0 = cfg.initial.quaternion()

    mission = cfg.mission
    if isinstance(mission, PositioningMission):
        mission_kind = kernels.MISSION_POSITIONING
        target = mission.target
        r_tol = mission.tolerance_radius
        fallback_yaw = mission.fallback_yaw
        ref_eta = np.zeros((1, 7))
        ref_etadot = np.zeros((1, 7))
    else:
        mission_kind = kernels.MISSION_PRECOMPUTED
        target = np.zeros(3)
        r_tol = 0.0
        fallback_yaw = 0.0
        if isinstance(mission, PathMission) and (n - 1) * dt > mission.duration:
            raise ConfigError(
                f"t_end={cfg.t_end} exceeds the path mission schedule "
                f"({mission.duration:.1f} s)"
            )
        t_grid = np.arange(n) * dt
        ref_eta, ref_etadot = precompute_reference(mission, t_grid, q0)

    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    turb = cfg.wind.turbulence_std * rng.standard_normal((n, 3))
    est_noise = cfg.wind_estimate.noise_std * rng.standard_normal((n, 3))

    if cfg.wind.shift_time is None:
        shift_step = n + 1
    else:
        shift_step = int(round(cfg.wind.shift_time / dt))

    (
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
    ) = kernels.run_closed_loop(
        n,
        dt,
        params.M,
        params.M_inv,
        params.c,
        params.m,
        params.m_w,
        params.g,
        params.aero.lin,
        params.aero.quad,
        params.sat,
        params.tau_act,
        cfg.mode == "actual",
        gains.k1,
        gains.l1,
        gains.l2,
        gains.ls,
        gains.eps,
        gains.rho0,
        gains.switch_code,
        gains.flavor_code,
        mission_kind,
        target,
        r_tol,
        fallback_yaw,
        ref_eta,
        ref_etadot,
        cfg.wind.mean_before(),
        cfg.wind.mean_after(),
        shift_step,
        turb,
        cfg.wind_estimate.bias,
        est_noise,
        cfg.disturbance,
        cfg.initial.body_state(),
        cfg.initial.p,
        q0,
        cfg.blowup_limit,
    )
    if status == kernels.STATUS_BLOWUP:
        raise NumericalBlowup(bad_step)
    if status == kernels.STATUS_RANK_DEFICIENT:
        raise RankDeficientT(f"T(q) lost full column rank at step {bad_step}")

    return TimeSeriesLog(
        t=np.arange(n) * dt,
        eta=eta_log,
        x=x_log,
        z1=z1_log,
        z1_dot=z1dot_log,
        z2=z2_log,
        f_cmd=fcmd_log,
        f_applied=fapp_log,
        lyapunov=lyap_log,
        sigma_sigmadot=ssd_log,
        meta={
            "config": cfg.to_dict(),
            "backend": kernels.BACKEND,
            "rng": RNG_ALGORITHM,
            "seed": cfg.seed,
            "flavor": gains.flavor,
        },
    )
