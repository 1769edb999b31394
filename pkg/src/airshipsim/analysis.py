"""Post-run metrics: phase planes, reaching times, RMS, steady-state errors,
Lyapunov traces, and dual-behavior detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ChannelOutOfRange(IndexError):
    """Raised for error-channel indexes outside 0..6."""


class EmptyWindow(ValueError):
    """Raised when a requested averaging window contains no samples."""


def _check_channel(channel: int, width: int = 7) -> int:
    if not 0 <= channel < width:
        raise ChannelOutOfRange(f"channel {channel} outside 0..{width - 1}")
    return channel


@dataclass
class PhaseSeries:
    """Ordered (z1, z1_dot) pairs for one channel plus the sliding line slope."""

    channel: int
    z1: np.ndarray
    z1_dot: np.ndarray
    slope: float

    def surface_residual(self) -> np.ndarray:
        """Distance |z1_dot - slope * z1| from the sliding line."""
        return np.abs(self.z1_dot - self.slope * self.z1)


def phase_plane(log, channel: int) -> PhaseSeries:
    """Extract the channel's (z1, z1_dot) pairs; slope is -K1 of the channel."""
    _check_channel(channel)
    k1 = np.asarray(log.meta["config"]["gains"]["k1"], dtype=float)
    return PhaseSeries(
        channel=channel,
        z1=log.z1[:, channel].copy(),
        z1_dot=log.z1_dot[:, channel].copy(),
        slope=-k1[channel],
    )


def reaching_time(log, channel: int, tol: float):
    """First time after which |sigma| stays below tol; None if never."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    _check_channel(channel)
    sigma = np.abs(log.z2[:, channel])
    outside = sigma >= tol
    if not outside.any():
        return float(log.t[0])
    last_out = int(np.nonzero(outside)[0][-1])
    if last_out == len(sigma) - 1:
        return None
    return float(log.t[last_out + 1])


def rms(series) -> float:
    """Root mean square of a sample series."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise EmptyWindow("rms of an empty series")
    return float(np.sqrt(np.mean(series * series)))


def steady_state_error(log, channel: int, window: float) -> float:
    """Mean absolute z1 error over the final `window` seconds."""
    _check_channel(channel)
    t = log.t
    if window <= 0 or window > t[-1] - t[0] + (t[1] - t[0] if len(t) > 1 else 0):
        raise EmptyWindow(f"window {window} s outside the log duration")
    mask = t >= t[-1] - window
    if not mask.any():
        raise EmptyWindow(f"window {window} s selects no samples")
    return float(np.mean(np.abs(log.z1[mask, channel])))


def lyapunov_trace(log):
    """(t, V) series of the run."""
    return log.t.copy(), log.lyapunov.copy()


def dual_behavior_detector(t, sigma_sigmadot, lyapunov=None, v_dot=None):
    """Intervals where sigma' sigma_dot > 0 while the Lyapunov rate is < 0.

    The Lyapunov rate is taken from `v_dot` when provided, else from a
    central finite difference of `lyapunov`.  Returns a list of
    (t_start, t_end) interval tuples.
    """
    t = np.asarray(t, dtype=float)
    ssd = np.asarray(sigma_sigmadot, dtype=float)
    if v_dot is None:
        if lyapunov is None:
            raise ValueError("need lyapunov values or v_dot samples")
        v_dot = np.gradient(np.asarray(lyapunov, dtype=float), t)
    else:
        v_dot = np.asarray(v_dot, dtype=float)
    active = (ssd > 0.0) & (v_dot < 0.0)
    intervals = []
    start = None
    for i, flag in enumerate(active):
        if flag and start is None:
            start = t[i]
        elif not flag and start is not None:
            intervals.append((start, t[i]))
            start = None
    if start is not None:
        intervals.append((start, t[-1]))
    return intervals


def dual_behavior_events(log):
    """Dual-behavior intervals of a closed-loop log."""
    return dual_behavior_detector(log.t, log.sigma_sigmadot, lyapunov=log.lyapunov)


# ---------------------------------------------------------------------------
# mission-level metrics
# ---------------------------------------------------------------------------


def horizontal_distance(log, target) -> np.ndarray:
    """Per-step horizontal (N, E) distance to a target point."""
    target = np.asarray(target, dtype=float).reshape(3)
    d = log.eta[:, :2] - target[:2]
    return np.hypot(d[:, 0], d[:, 1])


def settle_time(log, target, radius: float):
    """First time after which the vehicle stays inside the radius; None if never."""
    dist = horizontal_distance(log, target)
    outside = dist > radius
    if not outside.any():
        return float(log.t[0])
    last_out = int(np.nonzero(outside)[0][-1])
    if last_out == len(dist) - 1:
        return None
    return float(log.t[last_out + 1])


def fitted_surface_slope(log, channel: int, tail_fraction: float = 0.25) -> float:
    """Least-squares slope of z1_dot vs z1 over the trailing samples."""
    _check_channel(channel)
    n = len(log.t)
    i0 = int(n * (1.0 - tail_fraction))
    z1 = log.z1[i0:, channel]
    z1d = log.z1_dot[i0:, channel]
    denom = float(z1 @ z1)
    if denom == 0.0:
        raise EmptyWindow("trailing window has zero z1 energy")
    return float((z1 @ z1d) / denom)


def metrics_report(log, window_fraction: float = 0.1, sliding_tol: float = None) -> dict:
    """Standard per-run metrics dictionary (JSON-ready)."""
    cfg = log.meta.get("config", {})
    duration = float(log.t[-1] - log.t[0]) if len(log) > 1 else float(log.t[0])
    window = max(duration * window_fraction, float(log.t[1] - log.t[0])) if len(log) > 1 else duration
    if sliding_tol is None:
        sliding_tol = 1e-3 if cfg.get("mode") == "ideal" else 0.05
    report = {
        "flavor": log.meta.get("flavor"),
        "backend": log.meta.get("backend"),
        "seed": log.meta.get("seed"),
        "n_steps": len(log),
        "steady_state_error": [
            steady_state_error(log, ch, window) for ch in range(7)
        ],
        "rms_wrench_cmd": [rms(log.f_cmd[:, i]) for i in range(6)],
        "rms_wrench_applied": [rms(log.f_applied[:, i]) for i in range(6)],
        "reaching_time": [reaching_time(log, ch, sliding_tol) for ch in range(7)],
        "sliding_tol": sliding_tol,
        "final_lyapunov": float(log.lyapunov[-1]),
        "dual_behavior_intervals": dual_behavior_events(log),
    }
    mission = cfg.get("mission", {})
    if mission.get("kind") == "positioning":
        target = np.asarray(mission["target"], dtype=float)
        dist = horizontal_distance(log, target)
        report["final_distance_to_target"] = float(dist[-1])
        report["max_distance_to_target"] = float(dist.max())
        report["settle_time"] = settle_time(log, target, mission.get("tolerance_radius", 2.5))
        report["max_north_overshoot"] = float(np.max(log.eta[:, 0] - target[0]))
    return report
