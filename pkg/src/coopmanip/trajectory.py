"""Desired pose trajectories for single region transitions.

Each transition gets a straight-segment position trajectory between the two
cell centers plus a constant orientation target. Two time scalings are
provided:

* ``quintic``: minimum-jerk style polynomial with zero boundary velocity and
  acceleration; peak speed 15 D / (8 dur).
* ``cruise``: constant-speed middle with an ease-in velocity ramp of
  ``ramp_up`` seconds and an ease-out ramp of ``ramp_down`` seconds, C^2 in
  position. Peak speed D / (dur - ramp_up/3 - ramp_down/2), barely above the
  mean. The ease-in ramp front-loads the acceleration (peak near a quarter
  of the ramp, tapering cubically): with a small position-loop gain the
  funnel controller builds up speed only as its normalized error approaches
  the envelope edge, and a tapering approach keeps the remaining velocity
  deficit inside what the velocity loop can absorb. The exit ramp may be
  fast because backing away from the envelope edge relaxes the loop.

Both profiles park exactly at the end center for all t >= t0 + duration, so
the containment tube around the desired point stays inside the closed union
of the two cells by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAdjacent
from .partition import Partition


def _smoothstep(u: float):
    """Quintic smoothstep q and its first two derivatives at u in [0, 1]."""
    q = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    dq = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    ddq = u * (60.0 + u * (-180.0 + 120.0 * u))
    return q, dq, ddq


def _smoothstep_integral(u: float) -> float:
    # int_0^u q = 2.5 u^4 - 3 u^5 + u^6; equals 1/2 at u = 1
    return u ** 4 * (2.5 + u * (-3.0 + u))


def _ease_in(u: float):
    """Velocity ramp with acceleration ~ u (1-u)^3: B(0)=0, B(1)=1, zero
    acceleration at both ends, peak acceleration early (u = 1/4)."""
    b = 20.0 * (u * u / 2.0 - u ** 3 + 0.75 * u ** 4 - 0.2 * u ** 5)
    db = 20.0 * u * (1.0 - u) ** 3
    return b, db


def _ease_in_integral(u: float) -> float:
    # int_0^u B = 20 (u^3/6 - u^4/4 + 3 u^5/20 - u^6/30); equals 2/3 at u = 1
    return 20.0 * (u ** 3 / 6.0 - u ** 4 / 4.0 + 0.15 * u ** 5 - u ** 6 / 30.0)


@dataclass(frozen=True)
class TransitionTrajectory:
    """Desired object pose between two cell centers, parked after arrival."""

    start: np.ndarray
    end: np.ndarray
    eta_d: np.ndarray
    t0: float
    duration: float
    profile: str = "quintic"
    ramp_up: float = 0.0  # cruise ease-in ramp time (s)
    ramp_down: float = 0.0  # cruise ease-out ramp time (s)

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float).reshape(3))
        object.__setattr__(self, "end", np.asarray(self.end, dtype=float).reshape(3))
        object.__setattr__(self, "eta_d", np.asarray(self.eta_d, dtype=float).reshape(3))
        if self.duration <= 0.0:
            raise ValueError("duration must be positive")
        if self.profile not in ("quintic", "cruise"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.profile == "cruise":
            if self.ramp_up <= 0.0 or self.ramp_down <= 0.0:
                raise ValueError("cruise ramps must be positive")
            if self.ramp_up + self.ramp_down > self.duration:
                raise ValueError("cruise ramps must fit inside the duration")

    def cruise_speed(self) -> float:
        """Plateau speed of the cruise profile (fraction of the segment per second)."""
        return 1.0 / (self.duration - self.ramp_up / 3.0 - self.ramp_down / 2.0)

    def _scaling(self, t: float):
        """Path parameter s in [0, 1] and its first two time derivatives."""
        tau = t - self.t0
        if tau <= 0.0:
            return 0.0, 0.0, 0.0
        if tau >= self.duration:
            return 1.0, 0.0, 0.0
        if self.profile == "quintic":
            u = tau / self.duration
            q, dq, ddq = _smoothstep(u)
            return q, dq / self.duration, ddq / self.duration ** 2
        # cruise: velocity vc * ramp-shape, position by closed-form integrals
        t_up, t_dn, dur = self.ramp_up, self.ramp_down, self.duration
        vc = self.cruise_speed()
        if tau < t_up:
            u = tau / t_up
            b, db = _ease_in(u)
            return vc * t_up * _ease_in_integral(u), vc * b, vc * db / t_up
        if tau <= dur - t_dn:
            return vc * (2.0 * t_up / 3.0 + (tau - t_up)), vc, 0.0
        u = (dur - tau) / t_dn
        q, dq, _ = _smoothstep(u)
        return 1.0 - vc * t_dn * _smoothstep_integral(u), vc * q, -vc * dq / t_dn

    def eval(self, t: float):
        """Desired pose, velocity, acceleration (6-vectors) at time t."""
        s, ds, dds = self._scaling(t)
        seg = self.end - self.start
        x = np.concatenate([self.start + s * seg, self.eta_d])
        xd = np.concatenate([ds * seg, np.zeros(3)])
        xdd = np.concatenate([dds * seg, np.zeros(3)])
        return x, xd, xdd


def make_transition_trajectory(
    partition: Partition,
    j: int,
    j2: int,
    duration: float,
    t0: float,
    eta_d: np.ndarray,
    profile: str = "quintic",
    ramp_up: float = 0.0,
    ramp_down: float = 0.0,
) -> TransitionTrajectory:
    """Trajectory along the segment between the centers of adjacent cells."""
    if j2 not in partition.neighbors(j):
        raise NotAdjacent(f"regions {j} and {j2} are not face-adjacent")
    return TransitionTrajectory(
        partition.center(j), partition.center(j2), eta_d, t0, duration, profile, ramp_up, ramp_down
    )


def self_loop_trajectory(
    partition: Partition, j: int, duration: float, t0: float, eta_d: np.ndarray
) -> TransitionTrajectory:
    """Hold position at the cell center (realizes a self-transition)."""
    c = partition.center(j)
    return TransitionTrajectory(c, c, eta_d, t0, duration, "quintic")
