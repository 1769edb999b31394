"""SISO chain-of-integrators testbed for the two classical BSMC designs.

The plant is x_i' = x_{i+1} for i < n and x_n' = f_n(x) + g_n(x) u, regulated
to the origin.  Two controllers are provided:

* ``bsmc1``: sliding surface sigma = c1 z1 + ... + c_{n-1} z_{n-1} + z_n
* ``bsmc2``: sliding surface sigma = z_n (the design the vectorial airship
  controller generalizes)

The backstepping error recursion is z_i' = z_{i+1} - k_i z_i - z_{i-1}, which
makes the cross terms cancel in the Lyapunov derivative and lets bsmc2 keep
an explicit -lambda_{n-1} z_{n-1} feedback term, the source of its gain
independence.  With a fixed switching gain rho below the critical value
lambda_{n-1} |z_{n-1}| the bsmc2 loop shows the dual behavior (sigma
sigma_dot transiently positive while the Lyapunov function still decreases);
the time-varying schedule rho(t) = lambda_{n-1} |z_{n-1}| + rho0 restores
attraction and invariance.

Order n is capped at 3.  Stabilizing-function derivatives are computed
analytically from the recursion, never numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class DegenerateInputGain(ValueError):
    """Raised when |g_n| falls below the configured floor."""


class UnsupportedOrder(ValueError):
    """Raised for chain orders outside {2, 3}."""


def _check_order(n: int) -> int:
    if n not in (2, 3):
        raise UnsupportedOrder(f"chain order must be 2 or 3, got {n}")
    return n


@dataclass
class ChainPlant:
    """Chain of integrators with drift and input gain on the last stage."""

    n: int
    f_n: Callable[[np.ndarray], float] = lambda x: 0.0
    g_n: Callable[[np.ndarray], float] = lambda x: 1.0
    g_min: float = 1e-6

    def __post_init__(self):
        self.n = _check_order(self.n)

    def gain(self, x: np.ndarray) -> float:
        g = float(self.g_n(x))
        if abs(g) < self.g_min:
            raise DegenerateInputGain(f"|g_n| = {abs(g)} below floor {self.g_min}")
        return g

    def derivative(self, x: np.ndarray, u: float) -> np.ndarray:
        out = np.empty(self.n)
        out[:-1] = x[1:]
        out[-1] = float(self.f_n(x)) + self.gain(x) * u
        return out


def double_integrator() -> ChainPlant:
    return ChainPlant(n=2)


@dataclass(frozen=True)
class SisoGains:
    """Backstepping gains k_i (i <= n-1), lambda_i (i <= n), bsmc1 surface
    coefficients c_i, and the switching gain rho (fixed or time-varying)."""

    k: tuple
    lam: tuple
    c: tuple
    rho: float
    rho0: float = 0.0
    time_varying: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(float(v) for v in self.k))
        object.__setattr__(self, "lam", tuple(float(v) for v in self.lam))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        n = len(self.lam)
        _check_order(n)
        if len(self.k) != n - 1:
            raise ValueError(f"need {n - 1} backstepping gains, got {len(self.k)}")
        if len(self.c) != n - 1:
            raise ValueError(f"need {n - 1} surface coefficients, got {len(self.c)}")
        if any(v <= 0 for v in self.k) or any(v <= 0 for v in self.lam):
            raise ValueError("k and lambda gains must be > 0")
        if any(v <= 0 for v in self.c):
            raise ValueError("surface coefficients c must be > 0")
        if self.rho < 0 or self.rho0 < 0:
            raise ValueError("rho and rho0 must be >= 0")
        # Hurwitz gate on p(s) = c1 + c2 s + ... + s^(n-1).  For n <= 3 the
        # polynomial has degree <= 2, so positive coefficients already imply
        # Hurwitz; the explicit root check guards future order extensions.
        poly = np.array([1.0] + [self.c[i] for i in range(n - 2, -1, -1)])
        if len(poly) > 1 and np.any(np.roots(poly).real >= 0):
            raise ValueError("surface polynomial is not Hurwitz")

    @property
    def n(self) -> int:
        return len(self.lam)

    def to_dict(self) -> dict:
        return {
            "k": list(self.k),
            "lam": list(self.lam),
            "c": list(self.c),
            "rho": self.rho,
            "rho0": self.rho0,
            "time_varying": self.time_varying,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SisoGains":
        return cls(
            k=tuple(d["k"]),
            lam=tuple(d["lam"]),
            c=tuple(d["c"]),
            rho=float(d["rho"]),
            rho0=float(d.get("rho0", 0.0)),
            time_varying=bool(d.get("time_varying", False)),
        )


def _sgn(s: float) -> float:
    if s > 0.0:
        return 1.0
    if s < 0.0:
        return -1.0
    return 0.0


def chain_errors(x: np.ndarray, gains: SisoGains):
    """Backstepping variables (z, z_dot_recursion, alpha_dot_{n-1}).

    z follows z1 = x1, z_{i+1} = x_{i+1} - alpha_i with
    alpha_i = alpha_dot_{i-1} - z_{i-1} - k_i z_i, and the closed recursion
    z_i' = z_{i+1} - k_i z_i - z_{i-1} supplies analytic derivatives.
    """
    n = gains.n
    x = np.asarray(x, dtype=float).reshape(n)
    k = gains.k
    if n == 2:
        z1 = x[0]
        a1 = -k[0] * z1
        z2 = x[1] - a1
        z1d = z2 - k[0] * z1
        a1d = -k[0] * z1d
        return np.array([z1, z2]), np.array([z1d, np.nan]), a1d
    z1 = x[0]
    a1 = -k[0] * z1
    z2 = x[1] - a1
    z1d = z2 - k[0] * z1
    a1d = -k[0] * z1d
    a2 = a1d - z1 - k[1] * z2
    z3 = x[2] - a2
    z2d = z3 - k[1] * z2 - z1
    a1dd = -k[0] * z2d + k[0] * k[0] * z1d
    a2d = a1dd - z1d - k[1] * z2d
    return np.array([z1, z2, z3]), np.array([z1d, z2d, np.nan]), a2d


def effective_rho(gains: SisoGains, z: np.ndarray) -> float:
    """rho(t) = lambda_{n-1} |z_{n-1}| + rho0 when time varying, else rho."""
    if gains.time_varying:
        return gains.lam[gains.n - 2] * abs(z[gains.n - 2]) + gains.rho0
    return gains.rho


def _bsmc1_feedback(z, zdot, alpha_dot, sigma, gains: SisoGains, rho: float) -> float:
    """Bracketed feedback sum of the bsmc1 law (no z_{n-1} term)."""
    n = gains.n
    acc = alpha_dot - gains.lam[n - 1] * sigma - rho * _sgn(sigma)
    for i in range(n - 1):
        acc -= gains.c[i] * zdot[i]
    return acc


def _bsmc2_feedback(z, zdot, alpha_dot, sigma, gains: SisoGains, rho: float) -> float:
    """Bracketed feedback sum of the bsmc2 law (-lambda_{n-1} z_{n-1} kept)."""
    n = gains.n
    return (
        -gains.lam[n - 2] * z[n - 2]
        + alpha_dot
        - gains.lam[n - 1] * sigma
        - rho * _sgn(sigma)
    )


def sigma_bsmc1(z: np.ndarray, gains: SisoGains) -> float:
    n = gains.n
    return float(sum(gains.c[i] * z[i] for i in range(n - 1)) + z[n - 1])


def bsmc1_control(x, gains: SisoGains, plant: ChainPlant) -> float:
    """u = (1/g_n)[-f_n - sum c_i z_i' + alpha'_{n-1} - lam_n sigma - rho sgn]."""
    z, zdot, alpha_dot = chain_errors(x, gains)
    sigma = sigma_bsmc1(z, gains)
    g = plant.gain(np.asarray(x, dtype=float))
    fb = _bsmc1_feedback(z, zdot, alpha_dot, sigma, gains, gains.rho)
    return (-float(plant.f_n(np.asarray(x, dtype=float))) + fb) / g


def bsmc2_control(x, gains: SisoGains, plant: ChainPlant) -> float:
    """u = (1/g_n)[-f_n - lam_{n-1} z_{n-1} + alpha'_{n-1} - lam_n sigma - rho sgn]."""
    z, zdot, alpha_dot = chain_errors(x, gains)
    sigma = z[gains.n - 1]
    rho = effective_rho(gains, z)
    g = plant.gain(np.asarray(x, dtype=float))
    fb = _bsmc2_feedback(z, zdot, alpha_dot, sigma, gains, rho)
    return (-float(plant.f_n(np.asarray(x, dtype=float))) + fb) / g


def sigma_b2_coeffs(gains: SisoGains, n: Optional[int] = None) -> tuple:
    """sigma = z_n expanded over (z1, z1', z1'').

    n=2 gives (k1, 1); n=3 gives (1 + k1 k2, k1 + k2, 1).  The constant in
    the n=3 leading coefficient comes out of the recursion as exactly 1.
    """
    n = gains.n if n is None else _check_order(n)
    k = gains.k
    if n == 2:
        return (k[0], 1.0)
    return (1.0 + k[0] * k[1], k[0] + k[1], 1.0)


def rho_crit(lambda_nm1: float, z_nm1: float) -> float:
    """Critical switching gain lambda_{n-1} |z_{n-1}| of the bsmc2 design."""
    if lambda_nm1 <= 0:
        raise ValueError("lambda_{n-1} must be > 0")
    return lambda_nm1 * abs(z_nm1)


def backstepping_vdot(z, k) -> float:
    """Pure-backstepping Lyapunov derivative -sum k_i z_i^2 (cross terms
    cancel by the recursion)."""
    z = np.asarray(z, dtype=float)
    k = np.asarray(k, dtype=float)
    return float(-(k * z * z).sum())


def bsmc2_sigma_sigmadot(z: np.ndarray, gains: SisoGains,
                         rho: Optional[float] = None) -> float:
    """Closed form -lam_{n-1} z_{n-1} z_n - lam_n z_n^2 - rho |z_n|."""
    n = gains.n
    if rho is None:
        rho = effective_rho(gains, z)
    return (
        -gains.lam[n - 2] * z[n - 2] * z[n - 1]
        - gains.lam[n - 1] * z[n - 1] * z[n - 1]
        - rho * abs(z[n - 1])
    )


def bsmc1_sigma_sigmadot(z: np.ndarray, gains: SisoGains) -> float:
    """Closed form -lam_n sigma^2 - rho |sigma| (always negative)."""
    sigma = sigma_bsmc1(z, gains)
    n = gains.n
    return -gains.lam[n - 1] * sigma * sigma - gains.rho * abs(sigma)


def bsmc2_lyapunov(z: np.ndarray, gains: SisoGains) -> float:
    """Weighted certificate 0.5 sum lam-ish: for n=2, 0.5 lam1 z1^2 + 0.5 z2^2.

    The weight on the intermediate errors matches the feedback term
    -lambda_{n-1} z_{n-1} so the cross terms cancel exactly (the same
    structure the vectorial design uses).
    """
    n = gains.n
    v = 0.5 * z[n - 1] * z[n - 1]
    v += 0.5 * gains.lam[n - 2] * z[n - 2] * z[n - 2]
    if n == 3:
        v += 0.5 * z[0] * z[0]
    return float(v)


def bsmc2_vdot(z: np.ndarray, gains: SisoGains, rho: Optional[float] = None) -> float:
    """Closed-form derivative of bsmc2_lyapunov along the closed loop.

    Exact for n=2: -lam1 k1 z1^2 - lam2 z2^2 - rho |z2|.  For n=3 the
    remaining (1 - lam2) z1 z2 cross term of the weighted certificate is
    included, so the value matches a finite difference of bsmc2_lyapunov.
    """
    n = gains.n
    if rho is None:
        rho = effective_rho(gains, z)
    v = (
        -gains.lam[n - 2] * gains.k[n - 2] * z[n - 2] * z[n - 2]
        - gains.lam[n - 1] * z[n - 1] * z[n - 1]
        - rho * abs(z[n - 1])
    )
    if n == 3:
        v += -gains.k[0] * z[0] * z[0] + (1.0 - gains.lam[1]) * z[0] * z[1]
    return float(v)


# ---------------------------------------------------------------------------
# closed-loop regulation runs
# ---------------------------------------------------------------------------

CONTROLLERS = ("bsmc1", "bsmc2")


@dataclass
class SisoLog:
    """Uniform-grid record of a SISO regulation run."""

    t: np.ndarray
    z: np.ndarray
    sigma: np.ndarray
    u: np.ndarray
    sigma_sigmadot: np.ndarray
    lyapunov: np.ndarray
    controller: str
    gains: SisoGains = field(repr=False, default=None)

    def columns(self):
        names = ["t"] + [f"z{i + 1}" for i in range(self.z.shape[1])]
        names += ["sigma", "u", "sigma_sigmadot", "lyapunov"]
        return names

    def as_table(self) -> np.ndarray:
        return np.column_stack(
            [self.t, self.z, self.sigma, self.u, self.sigma_sigmadot, self.lyapunov]
        )

    def to_csv_bytes(self) -> bytes:
        import io

        buf = io.StringIO()
        buf.write(",".join(self.columns()) + "\n")
        for row in self.as_table():
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        return buf.getvalue().encode()

    def save(self, directory, stem: str) -> dict:
        import hashlib
        import json
        import os

        os.makedirs(directory, exist_ok=True)
        csv_path = os.path.join(directory, f"{stem}_log.csv")
        data = self.to_csv_bytes()
        with open(csv_path, "wb") as fh:
            fh.write(data)
        sidecar = {
            "columns": self.columns(),
            "csv_sha256": "sha256:" + hashlib.sha256(data).hexdigest(),
            "controller": self.controller,
            "gains": self.gains.to_dict() if self.gains is not None else None,
        }
        meta_path = os.path.join(directory, f"{stem}_log.meta.json")
        with open(meta_path, "w") as fh:
            json.dump(sidecar, fh, indent=2)
        return {"csv": csv_path, "meta": meta_path}


def run_chain(plant: ChainPlant, gains: SisoGains, controller: str,
              x0, dt: float, t_end: float) -> SisoLog:
    """Fixed-step closed loop: control held over each RK4 plant step."""
    if controller not in CONTROLLERS:
        raise ValueError(f"controller must be one of {CONTROLLERS}")
    if gains.n != plant.n:
        raise ValueError("gain order does not match plant order")
    n_steps = max(1, int(round(t_end / dt)))
    n = plant.n
    x = np.asarray(x0, dtype=float).reshape(n).copy()

    t_log = np.arange(n_steps) * dt
    z_log = np.empty((n_steps, n))
    sig_log = np.empty(n_steps)
    u_log = np.empty(n_steps)
    ssd_log = np.empty(n_steps)
    v_log = np.empty(n_steps)

    use_b2 = controller == "bsmc2"
    for i in range(n_steps):
        z, zdot, alpha_dot = chain_errors(x, gains)
        if use_b2:
            sigma = z[n - 1]
            rho = effective_rho(gains, z)
            u = bsmc2_control(x, gains, plant)
            ssd = bsmc2_sigma_sigmadot(z, gains, rho)
            v = bsmc2_lyapunov(z, gains)
        else:
            sigma = sigma_bsmc1(z, gains)
            u = bsmc1_control(x, gains, plant)
            ssd = bsmc1_sigma_sigmadot(z, gains)
            v = 0.5 * float((z * z).sum())
        z_log[i] = z
        sig_log[i] = sigma
        u_log[i] = u
        ssd_log[i] = ssd
        v_log[i] = v

        k1 = plant.derivative(x, u)
        k2 = plant.derivative(x + 0.5 * dt * k1, u)
        k3 = plant.derivative(x + 0.5 * dt * k2, u)
        k4 = plant.derivative(x + dt * k3, u)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    return SisoLog(
        t=t_log, z=z_log, sigma=sig_log, u=u_log,
        sigma_sigmadot=ssd_log, lyapunov=v_log,
        controller=controller, gains=gains,
    )
