"""Distributed model-free funnel controller for one region transition.

Per transition, each of the 12 scalar tracking channels (6 pose, 6 velocity)
gets an exponentially decaying performance envelope rho(t). The pose errors
are normalized by their envelopes, pushed through the log-ratio transform,
and turned into a reference velocity; the velocity errors are normalized and
transformed the same way and produce the agent wrenches

    u_i = -c_i g_v J_Oi^{-T} P_v^{-1}(t) R_v(xi_v) eps_v(xi_v),

so every agent computes its own input from the object state and off-line
parameters only. Nothing in this module may depend on the truth model: the
only imports are kinematics, the trajectory, and the envelope parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnvelopeViolated, EnvelopeViolatedAtStart
from .kinematics import (
    GraspOffset,
    analytic_jacobian,
    analytic_jacobian_inv,
    euler_to_rotation,
    skew,
    wrap_angle,
)
from .trajectory import TransitionTrajectory

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class PerformanceFunction:
    """Envelope rho(t) = (rho0 - rho_inf) exp(-decay (t - t0)) + rho_inf."""

    rho0: float
    rho_inf: float
    decay: float
    t0: float

    def __post_init__(self):
        if not self.rho0 > self.rho_inf > 0.0:
            raise ValueError("need rho0 > rho_inf > 0")
        if self.decay <= 0.0:
            raise ValueError("decay rate must be positive")

    def value(self, t: float) -> float:
        return (self.rho0 - self.rho_inf) * math.exp(-self.decay * (t - self.t0)) + self.rho_inf


def performance_values(envelopes, t: float) -> np.ndarray:
    return np.array([e.value(t) for e in envelopes])


@dataclass(frozen=True)
class ControllerGains:
    """Positive channel gains and the convex load shares."""

    g_s: np.ndarray  # per-channel pose gains (6,)
    g_v: float
    shares: np.ndarray  # one per agent, summing to 1

    def __post_init__(self):
        object.__setattr__(self, "g_s", np.asarray(self.g_s, dtype=float).reshape(6))
        object.__setattr__(self, "shares", np.asarray(self.shares, dtype=float).reshape(-1))
        if np.any(self.g_s <= 0.0) or self.g_v <= 0.0:
            raise ValueError("gains must be positive")
        if np.any(self.shares < 0.0) or np.any(self.shares > 1.0):
            raise ValueError("load shares must lie in [0, 1]")
        if abs(self.shares.sum() - 1.0) > 1e-12:
            raise ValueError("load shares must sum to 1")


@dataclass(frozen=True)
class EnvelopeParams:
    """Scenario-level recipe for selecting the per-transition envelopes."""

    tube: float  # l0 (m): pins the initial pose envelope on position channels
    rho_inf_s: float
    decay_s: float
    rho0_s_rot: float
    rho_inf_v: float
    decay_v: float
    conservative: bool = True  # True: rho0 = tube/sqrt(3) so the Euclidean tube claim holds

    def rho0_s_pos(self) -> float:
        return self.tube / SQRT3 if self.conservative else self.tube


def transformed_error(xi):
    """Log-ratio transform ln((1+xi)/(1-xi)); odd, zero at zero, blows up at +-1."""
    xi = np.asarray(xi, dtype=float)
    return np.log1p(xi) - np.log1p(-xi)


def reference_velocity(xi_s: np.ndarray, gains: ControllerGains) -> np.ndarray:
    """Reference velocity -g_s * eps(xi_s) for the velocity-level loop."""
    xi_s = np.asarray(xi_s, dtype=float).reshape(6)
    if np.any(np.abs(xi_s) >= 1.0):
        k = int(np.argmax(np.abs(xi_s)))
        raise EnvelopeViolated(float("nan"), f"xi_s[{k}]", float(xi_s[k]))
    return -gains.g_s * transformed_error(xi_s)


class ControllerState:
    """Envelopes and geometry for one active transition."""

    def __init__(
        self,
        trajectory: TransitionTrajectory,
        gains: ControllerGains,
        grasps: list,
        rho_s: list,
        rho_v: list,
        t0: float,
    ):
        self.trajectory = trajectory
        self.gains = gains
        self.grasps = list(grasps)
        self.rho_s = list(rho_s)
        self.rho_v = list(rho_v)
        self.t0 = t0

    # -- error pipeline ----------------------------------------------------

    def pose_error(self, x_obj: np.ndarray, t: float) -> np.ndarray:
        x_d, _, _ = self.trajectory.eval(t)
        e = np.asarray(x_obj, dtype=float).reshape(6) - x_d
        e[3:] = wrap_angle(e[3:])
        return e

    def evaluate(self, x_obj: np.ndarray, v_obj: np.ndarray, t: float) -> dict:
        """All controller intermediates at (x, v, t); raises on envelope exit."""
        e_s = self.pose_error(x_obj, t)
        rho_s = performance_values(self.rho_s, t)
        xi_s = e_s / rho_s
        self._check(xi_s, "xi_s", t)
        xdot_star = -self.gains.g_s * transformed_error(xi_s)
        e_v = np.asarray(v_obj, dtype=float).reshape(6) - xdot_star
        rho_v = performance_values(self.rho_v, t)
        xi_v = e_v / rho_v
        self._check(xi_v, "xi_v", t)
        return {
            "e_s": e_s,
            "rho_s": rho_s,
            "xi_s": xi_s,
            "xdot_star": xdot_star,
            "e_v": e_v,
            "rho_v": rho_v,
            "xi_v": xi_v,
        }

    @staticmethod
    def _check(xi: np.ndarray, name: str, t: float) -> None:
        if np.any(np.abs(xi) >= 1.0):
            k = int(np.argmax(np.abs(xi)))
            raise EnvelopeViolated(t, f"{name}[{k}]", float(xi[k]))


def agent_control(
    xi_v: np.ndarray,
    rho_v: np.ndarray,
    x_obj: np.ndarray,
    grasp: GraspOffset,
    gains: ControllerGains,
    i: int,
    t: float = float("nan"),
) -> np.ndarray:
    """Wrench of agent i given the normalized velocity error.

    Uses the closed-form block inverse-transpose of the object->agent
    Jacobian; cheaper and better conditioned than a dense 6x6 solve.
    """
    xi_v = np.asarray(xi_v, dtype=float).reshape(6)
    if np.any(np.abs(xi_v) >= 1.0):
        k = int(np.argmax(np.abs(xi_v)))
        raise EnvelopeViolated(t, f"xi_v[{k}]", float(xi_v[k]))
    r_v = 2.0 / (1.0 - xi_v * xi_v)
    y = (r_v * transformed_error(xi_v)) / np.asarray(rho_v, dtype=float).reshape(6)

    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    eta = x_obj[3:]
    rel = -(euler_to_rotation(eta) @ grasp.r)  # p_O - p_E in world frame
    eta_agent = wrap_angle(eta + grasp.alpha)
    j_agent = analytic_jacobian(eta_agent)
    j_obj_inv = analytic_jacobian_inv(eta)
    # J_Oi^{-T} = [[I, 0], [J_E^T S(rel), J_E^T J_O^{-T}]]
    u = np.empty(6)
    u[:3] = y[:3]
    u[3:] = j_agent.T @ (skew(rel) @ y[:3] + j_obj_inv.T @ y[3:])
    return -gains.shares[i] * gains.g_v * u


def controller_tick(
    cs: ControllerState, x_obj: np.ndarray, v_obj: np.ndarray, t: float
):
    """Stacked agent wrench plus diagnostics at one control instant."""
    diag = cs.evaluate(x_obj, v_obj, t)
    n = len(cs.grasps)
    u = np.empty(6 * n)
    for i, grasp in enumerate(cs.grasps):
        u[6 * i : 6 * i + 6] = agent_control(
            diag["xi_v"], diag["rho_v"], x_obj, grasp, cs.gains, i, t
        )
    return u, diag


def init_transition(
    x_obj: np.ndarray,
    v_obj: np.ndarray,
    trajectory: TransitionTrajectory,
    gains: ControllerGains,
    grasps: list,
    params: EnvelopeParams,
    t0: float,
) -> ControllerState:
    """Select fresh envelopes at the start of a transition.

    Position channels get rho0 pinned by the tube radius (optionally divided
    by sqrt(3) so the componentwise bounds imply the Euclidean one);
    orientation channels get a configured rho0, inflated if the initial error
    is already larger; velocity channels get 2|e_v(t0)| + 0.1.

    Raises:
        EnvelopeViolatedAtStart: if some initial normalized error is not
            strictly inside (-1, 1), which for the pinned position channels
            means the object starts outside the tube.
    """
    rho0_pos = params.rho0_s_pos()
    cs = ControllerState(trajectory, gains, grasps, [], [], t0)
    e_s = cs.pose_error(x_obj, t0)
    rho_s = []
    for k in range(6):
        if k < 3:
            rho0 = rho0_pos
            if abs(e_s[k]) >= rho0:
                raise EnvelopeViolatedAtStart(
                    f"pose channel {k}: |e|={abs(e_s[k]):.6g} >= rho0={rho0:.6g} at t0={t0:.6f}"
                )
        else:
            rho0 = max(params.rho0_s_rot, 2.0 * abs(e_s[k]) + 0.1)
        rho_s.append(PerformanceFunction(rho0, min(params.rho_inf_s, 0.5 * rho0), params.decay_s, t0))
    cs.rho_s = rho_s

    xi_s0 = e_s / performance_values(rho_s, t0)
    xdot_star0 = -gains.g_s * transformed_error(xi_s0)
    e_v0 = np.asarray(v_obj, dtype=float).reshape(6) - xdot_star0
    rho_v = []
    for k in range(6):
        rho0 = 2.0 * abs(e_v0[k]) + 0.1
        rho_v.append(PerformanceFunction(rho0, min(params.rho_inf_v, 0.5 * rho0), params.decay_v, t0))
    cs.rho_v = rho_v
    return cs
