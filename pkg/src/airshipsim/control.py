"""Unified vectorial BS / SMC / BSMC control family.

All three flavors share one acceleration command structure on the 7-vector
pose error; they differ in single terms:

* BSMC: ``-L1 z1 - K1 z1_dot - L2 z2 - Ls sgn(z2)``
* BS:   drops the switching term ``Ls sgn(z2)``
* SMC:  drops the primary-error feedback ``L1 z1``

with the sliding variable ``sigma = z2 = z1_dot + K1 z1``.  The wrench that
realizes the command inverts the airship model through the pseudo-inverse of
T (recomputed every call, SVD based).

Note the commanded pose acceleration is a 7-vector while the wrench has only
6 components: T has rank 6 and T T+ projects the command onto the realizable
subspace (the quaternion channel component along q is unreachable).  The
push-through identity between commanded and achieved acceleration is exact
on that subspace; see the tests for the constructions used to verify it.

The quaternion part of z1 is the plain component-wise difference q - q_d;
reference generators keep q_d in the hemisphere of the current attitude so
the subtraction stays small for small rotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .model import AirshipParams, NonUnitQuaternion, _check_unit_quat

FLAVORS = ("bs", "smc", "bsmc")
SWITCH_MODES = ("fixed", "timevarying")

_FLAVOR_CODE = {"bs": kernels.FLAVOR_BS, "smc": kernels.FLAVOR_SMC, "bsmc": kernels.FLAVOR_BSMC}
_SWITCH_CODE = {"fixed": kernels.SWITCH_FIXED, "timevarying": kernels.SWITCH_TIMEVARYING}


class RankDeficientT(RuntimeError):
    """Raised when the kinematic matrix T loses full column rank."""


def _diag7(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = np.full(7, float(arr))
    arr = arr.reshape(7)
    if np.any(arr <= 0):
        raise ValueError(f"{name} diagonal entries must be > 0")
    return arr


@dataclass(frozen=True)
class GainSet:
    """Diagonal controller gains (stored as 7-vectors) plus flavor selection.

    eps is the boundary-layer thickness of the switching-term smoothing
    (0 selects the hard sign function); rho0 is the base gain of the
    time-varying switching schedule.
    """

    k1: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    ls: np.ndarray
    eps: float = 0.1
    rho0: float = 0.1
    switch_mode: str = "fixed"
    flavor: str = "bsmc"

    def __post_init__(self):
        object.__setattr__(self, "k1", _diag7(self.k1, "K1"))
        object.__setattr__(self, "l1", _diag7(self.l1, "L1"))
        object.__setattr__(self, "l2", _diag7(self.l2, "L2"))
        object.__setattr__(self, "ls", _diag7(self.ls, "Ls"))
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if self.rho0 < 0:
            raise ValueError("rho0 must be >= 0")
        if self.switch_mode not in SWITCH_MODES:
            raise ValueError(f"switch_mode must be one of {SWITCH_MODES}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")

    @property
    def flavor_code(self) -> int:
        return _FLAVOR_CODE[self.flavor]

    @property
    def switch_code(self) -> int:
        return _SWITCH_CODE[self.switch_mode]

    def replace(self, **kw) -> "GainSet":
        d = self.to_dict()
        d.update(kw)
        return GainSet.from_dict(d)

    def to_dict(self) -> dict:
        return {
            "k1": self.k1.tolist(),
            "l1": self.l1.tolist(),
            "l2": self.l2.tolist(),
            "ls": self.ls.tolist(),
            "eps": self.eps,
            "rho0": self.rho0,
            "switch_mode": self.switch_mode,
            "flavor": self.flavor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GainSet":
        return cls(
            k1=d["k1"],
            l1=d["l1"],
            l2=d["l2"],
            ls=d["ls"],
            eps=float(d.get("eps", 0.1)),
            rho0=float(d.get("rho0", 0.1)),
            switch_mode=d.get("switch_mode", "fixed"),
            flavor=d.get("flavor", "bsmc"),
        )


def default_gains(flavor: str = "bsmc", eps: float = 0.1,
                  switch_mode: str = "fixed") -> GainSet:
    """Stock simulation gains: K1 = 0.2 I, L2 = 0.5 I, per-channel L1/Ls."""
    return GainSet(
        k1=np.full(7, 0.2),
        l1=np.array([0.05, 0.05, 0.05, 0.2, 0.2, 0.2, 0.2]),
        l2=np.full(7, 0.5),
        ls=np.array([0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.2]),
        eps=eps,
        rho0=0.1,
        switch_mode=switch_mode,
        flavor=flavor,
    )


@dataclass
class ErrorState:
    """Pose error z1, its rate, and the transformed error z2 = z1_dot + K1 z1."""

    z1: np.ndarray
    z1_dot: np.ndarray
    z2: np.ndarray

    def __post_init__(self):
        self.z1 = np.asarray(self.z1, dtype=float).reshape(7)
        self.z1_dot = np.asarray(self.z1_dot, dtype=float).reshape(7)
        self.z2 = np.asarray(self.z2, dtype=float).reshape(7)

    @property
    def sigma(self) -> np.ndarray:
        return self.z2

    @classmethod
    def from_errors(cls, z1, z1_dot, k1) -> "ErrorState":
        z1 = np.asarray(z1, dtype=float).reshape(7)
        z1_dot = np.asarray(z1_dot, dtype=float).reshape(7)
        k1 = np.asarray(k1, dtype=float).reshape(7)
        return cls(z1, z1_dot, z1_dot + k1 * z1)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def tracking_errors(eta, eta_dot_meas, ref, t: float, pose=None):
    """(z1, z1_dot) against the reference sampled at time t.

    eta_dot_meas must be built with the estimated wind (pose_rate with
    v_w_hat).  ``ref`` is any object with a ``sample(t, pose=...)`` method
    returning (eta_d, eta_d_dot); pass the current pose for quasi-static
    references like positioning.
    """
    eta = np.asarray(eta, dtype=float).reshape(7)
    eta_dot_meas = np.asarray(eta_dot_meas, dtype=float).reshape(7)
    eta_d, eta_d_dot = ref.sample(t, pose=eta if pose is None else pose)
    return eta - eta_d, eta_dot_meas - eta_d_dot


def virtual_velocity(eta_d_dot, z1, k1) -> np.ndarray:
    """First-stage stabilizing function alpha1 = eta_d_dot - K1 z1."""
    eta_d_dot = np.asarray(eta_d_dot, dtype=float).reshape(7)
    z1 = np.asarray(z1, dtype=float).reshape(7)
    k1 = np.asarray(k1, dtype=float).reshape(7)
    return eta_d_dot - k1 * z1


def z2_of(z1_dot, z1, k1) -> np.ndarray:
    """Transformed error z2 = z1_dot + K1 z1 (the sliding variable)."""
    z1_dot = np.asarray(z1_dot, dtype=float).reshape(7)
    z1 = np.asarray(z1, dtype=float).reshape(7)
    k1 = np.asarray(k1, dtype=float).reshape(7)
    return z1_dot + k1 * z1


def smooth_sign(sigma, eps: float) -> np.ndarray:
    """Elementwise sat(sigma) = sigma / (|sigma| + eps); hard sign at eps=0."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    return kernels.smooth_sign_core(sigma, float(eps))


def switching_gain(mode: str, l1, z1, rho0: float, ls) -> np.ndarray:
    """Effective switching-gain diagonal for the given mode."""
    if mode not in SWITCH_MODES:
        raise ValueError(f"switch mode must be one of {SWITCH_MODES}")
    l1 = np.asarray(l1, dtype=float).reshape(7)
    z1 = np.asarray(z1, dtype=float).reshape(7)
    ls = np.asarray(ls, dtype=float).reshape(7)
    return kernels.switching_gain_core(_SWITCH_CODE[mode], l1, z1, float(rho0), ls)


def effective_switch(err: ErrorState, gains: GainSet) -> np.ndarray:
    return kernels.switching_gain_core(
        gains.switch_code, gains.l1, err.z1, gains.rho0, gains.ls
    )


def control_accel(err: ErrorState, gains: GainSet) -> np.ndarray:
    """Commanded 7-vector pose acceleration for the active flavor."""
    ls_eff = effective_switch(err, gains)
    return kernels.control_accel_core(
        err.z1, err.z1_dot, err.z2, gains.k1, gains.l1, gains.l2,
        ls_eff, gains.eps, gains.flavor_code,
    )


def t_pseudo_inverse(q) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of T(q), SVD based, rank-checked."""
    T = kernels.build_T(_check_unit_quat(q))
    Tp, ok = kernels.pinv_full_column(T)
    if not ok:
        raise RankDeficientT("T(q) lost full column rank")
    return Tp


def control_wrench(x, eta, err: ErrorState, gains: GainSet,
                   params: AirshipParams) -> np.ndarray:
    """Final wrench command inverting the model around the accel command.

    ``err.z1_dot`` must already carry the wind estimate (it is the measured
    pose rate built with v_w_hat minus the reference rate).
    """
    x = np.asarray(x, dtype=float).reshape(6)
    eta = np.asarray(eta, dtype=float).reshape(7)
    q = _check_unit_quat(eta[3:])
    ls_eff = effective_switch(err, gains)
    f, ok = kernels.control_wrench_core(
        x, q, err.z1, err.z1_dot, err.z2, gains.k1, gains.l1, gains.l2,
        ls_eff, gains.eps, gains.flavor_code,
        params.M, params.M_inv, params.c, params.m, params.m_w, params.g,
        params.aero.lin, params.aero.quad,
    )
    if not ok:
        raise RankDeficientT("T(q) lost full column rank")
    return f


def lyapunov(err: ErrorState, l1) -> float:
    """v2 = 0.5 z1' L1 z1 + 0.5 z2' z2 (the BS/BSMC certificate)."""
    l1 = np.asarray(l1, dtype=float).reshape(7)
    return kernels.lyapunov_core(err.z1, err.z2, l1, kernels.FLAVOR_BSMC)


def lyapunov_value(err: ErrorState, gains: GainSet) -> float:
    """Flavor-consistent Lyapunov value (SMC uses 0.5 z2' z2 only)."""
    return kernels.lyapunov_core(err.z1, err.z2, gains.l1, gains.flavor_code)


def lyapunov_rate(err: ErrorState, gains: GainSet) -> float:
    """Closed-form Lyapunov derivative row for the active flavor."""
    ls_eff = effective_switch(err, gains)
    return kernels.lyapunov_rate_core(
        err.z1, err.z2, gains.k1, gains.l1, gains.l2, ls_eff,
        gains.eps, gains.flavor_code,
    )


def sigma_sigmadot(err: ErrorState, gains: GainSet) -> float:
    """Closed-form sigma' sigma_dot of the closed loop (sigma = z2)."""
    ls_eff = effective_switch(err, gains)
    return kernels.sigma_sigmadot_core(
        err.z1, err.z2, gains.l1, gains.l2, ls_eff, gains.eps,
        gains.flavor_code,
    )
