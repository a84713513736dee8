"""Truth model: coupled object-agents dynamics and its RK4 integration.

The controller never sees anything in here. The simulator instantiates one
concrete model satisfying the structure the control design assumes:

* object: Newton-Euler rigid body expressed in Euler-rate coordinates, so the
  generalized inertia is ``blockdiag(m I, J^T I_w J)`` (symmetric) and the
  conjugate force is ``[f, J^T n]``;
* agents: constant SPD task-space inertias, zero Coriolis, constant gravity
  wrench, plus bounded sinusoidal model uncertainty and disturbance;
* coupling: rigid grasps, so agent twists are ``J_Oi @ xdot_O`` and the
  object wrench is ``G^T`` times the stacked agent wrenches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteState
from .kinematics import (
    GraspOffset,
    analytic_jacobian,
    analytic_jacobian_dot,
    euler_to_rotation,
    object_agent_jacobian,
    object_agent_jacobian_dot,
    object_to_agent_pose,
    skew,
    wrap_angle,
)


@dataclass(frozen=True)
class Sinusoid6:
    """Componentwise bounded sinusoid amp * sin(omega t + phase) on R^6."""

    amplitude: np.ndarray
    omega: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        for name in ("amplitude", "omega", "phase"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(6))

    @staticmethod
    def zero() -> "Sinusoid6":
        z = np.zeros(6)
        return Sinusoid6(z, z, z)

    def value(self, t: float) -> np.ndarray:
        return self.amplitude * np.sin(self.omega * t + self.phase)

    def bound(self) -> np.ndarray:
        return np.abs(self.amplitude)


@dataclass(frozen=True)
class ObjectParams:
    """Object mass/inertia plus its external disturbance."""

    mass: float
    inertia: np.ndarray  # 3x3 SPD, body frame
    g0: float = 9.81
    disturbance: Sinusoid6 = field(default_factory=Sinusoid6.zero)

    def __post_init__(self):
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float).reshape(3, 3))
        if self.mass <= 0.0:
            raise ValueError("object mass must be positive")
        if not np.allclose(self.inertia, self.inertia.T):
            raise ValueError("object inertia must be symmetric")
        if np.linalg.eigvalsh(self.inertia).min() <= 0.0:
            raise ValueError("object inertia must be positive definite")


@dataclass(frozen=True)
class AgentParams:
    """Task-space truth model of one agent plus its grasp geometry."""

    inertia: np.ndarray  # 6x6 SPD, constant
    gravity: np.ndarray  # constant task-space gravity wrench
    grasp: GraspOffset
    share: float  # load sharing coefficient in [0, 1]
    uncertainty: Sinusoid6 = field(default_factory=Sinusoid6.zero)
    disturbance: Sinusoid6 = field(default_factory=Sinusoid6.zero)

    def __post_init__(self):
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float).reshape(6, 6))
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float).reshape(6))
        if not np.allclose(self.inertia, self.inertia.T):
            raise ValueError("agent inertia must be symmetric")
        if np.linalg.eigvalsh(self.inertia).min() <= 0.0:
            raise ValueError("agent inertia must be positive definite")
        if not 0.0 <= self.share <= 1.0:
            raise ValueError("load share must lie in [0, 1]")


def check_shares(agents: list) -> None:
    total = sum(a.share for a in agents)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"load shares must sum to 1, got {total!r}")


@dataclass
class CoupledState:
    """Object pose vector [p, eta], its rate, and the simulation clock."""

    x: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(6).copy()
        self.v = np.asarray(self.v, dtype=float).reshape(6).copy()

    def copy(self) -> "CoupledState":
        return CoupledState(self.x.copy(), self.v.copy(), self.t)


@dataclass(frozen=True)
class CoupledMatrices:
    """Assembled terms of the coupled equation Mt xddot + Ct xdot + ht + wt = G^T u."""

    m: np.ndarray
    c: np.ndarray
    h: np.ndarray
    w: np.ndarray
    grasp: np.ndarray  # 6N x 6 stacked Jacobians
    grasp_dot: np.ndarray


def object_matrices(x_obj: np.ndarray, v_obj: np.ndarray, params: ObjectParams):
    """Newton-Euler object terms in Euler-rate coordinates: (M_O, C_O, g_O).

    Rotational rows are premultiplied by J^T so that M_O is symmetric and the
    conjugate force is the generalized wrench [f, J^T n].
    """
    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    v_obj = np.asarray(v_obj, dtype=float).reshape(6)
    eta, eta_dot = x_obj[3:], v_obj[3:]
    rot = euler_to_rotation(eta)
    inertia_w = rot @ params.inertia @ rot.T
    jac = analytic_jacobian(eta)
    jac_dot = analytic_jacobian_dot(eta, eta_dot)
    omega = jac @ eta_dot

    m_mat = np.zeros((6, 6))
    m_mat[:3, :3] = params.mass * np.eye(3)
    m_mat[3:, 3:] = jac.T @ inertia_w @ jac
    c_mat = np.zeros((6, 6))
    c_mat[3:, 3:] = jac.T @ (inertia_w @ jac_dot + skew(omega) @ inertia_w @ jac)
    g_vec = np.zeros(6)
    g_vec[2] = params.mass * params.g0
    return m_mat, c_mat, g_vec


def coupled_matrices(state: CoupledState, obj: ObjectParams, agents: list) -> CoupledMatrices:
    """Assemble the coupled dynamics terms at the given state.

    Mt = M_O + sum J_i^T M_i J_i        Ct = C_O + sum J_i^T M_i Jdot_i
    ht = g_O + sum J_i^T (g_i + f_i)    wt = w_O + sum J_i^T w_i
    """
    m_o, c_o, g_o = object_matrices(state.x, state.v, obj)
    m_t = m_o.copy()
    c_t = c_o.copy()
    h_t = g_o.copy()
    w_t = obj.disturbance.value(state.t)
    jac_blocks = []
    jac_dot_blocks = []
    for a in agents:
        x_e = object_to_agent_pose(state.x, a.grasp)
        jac = object_agent_jacobian(x_e, state.x)
        jac_dot = object_agent_jacobian_dot(state.x, state.v, a.grasp)
        jac_blocks.append(jac)
        jac_dot_blocks.append(jac_dot)
        jt_m = jac.T @ a.inertia
        m_t += jt_m @ jac
        c_t += jt_m @ jac_dot
        h_t += jac.T @ (a.gravity + a.uncertainty.value(state.t))
        w_t += jac.T @ a.disturbance.value(state.t)
    if jac_blocks:
        grasp = np.vstack(jac_blocks)
        grasp_dot = np.vstack(jac_dot_blocks)
    else:
        grasp = np.zeros((0, 6))
        grasp_dot = np.zeros((0, 6))
    return CoupledMatrices(m_t, c_t, h_t, w_t, grasp, grasp_dot)


def acceleration(state: CoupledState, u_stack: np.ndarray, obj: ObjectParams, agents: list):
    """Forward dynamics: xddot_O and the matrices used to obtain it."""
    mats = coupled_matrices(state, obj, agents)
    rhs = mats.grasp.T @ u_stack - mats.c @ state.v - mats.h - mats.w
    xddot = np.linalg.solve(mats.m, rhs)
    return xddot, mats


def _require_finite(x: np.ndarray, v: np.ndarray, t: float) -> None:
    if not (np.isfinite(x).all() and np.isfinite(v).all()):
        raise NonFiniteState(f"state became non-finite at t={t:.6f}s")


def step(state: CoupledState, u_stack: np.ndarray, dt: float, obj: ObjectParams, agents: list) -> CoupledState:
    """One fixed-step RK4 update with the stacked input held over the step."""
    if not 0.0 < dt <= 1e-2:
        raise ValueError("dt must lie in (0, 1e-2]")
    u_stack = np.asarray(u_stack, dtype=float).reshape(6 * len(agents))

    def deriv(x, v, t):
        xddot, _ = acceleration(CoupledState(x, v, t), u_stack, obj, agents)
        return v, xddot

    x, v, t = state.x, state.v, state.t
    k1x, k1v = deriv(x, v, t)
    k2x, k2v = deriv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, t + 0.5 * dt)
    k3x, k3v = deriv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, t + 0.5 * dt)
    k4x, k4v = deriv(x + dt * k3x, v + dt * k3v, t + dt)
    x_new = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v_new = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    x_new[3:] = wrap_angle(x_new[3:])
    _require_finite(x_new, v_new, t + dt)
    return CoupledState(x_new, v_new, t + dt)


def step_controlled(state: CoupledState, control, dt: float, obj: ObjectParams, agents: list):
    """One RK4 update of the closed loop, re-evaluating the control law at
    every stage.

    ``control(x, v, t)`` must return the stacked agent wrench. Returns the new
    state plus the stage-1 evaluation (stacked input, acceleration, matrices)
    for logging, so a trace row costs no extra dynamics evaluation.
    """

    def deriv(x, v, t):
        u = control(x, v, t)
        xddot, mats = acceleration(CoupledState(x, v, t), u, obj, agents)
        return v, xddot, u, mats

    x, v, t = state.x, state.v, state.t
    k1x, k1v, u1, mats1 = deriv(x, v, t)
    k2x, k2v, _, _ = deriv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, t + 0.5 * dt)
    k3x, k3v, _, _ = deriv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, t + 0.5 * dt)
    k4x, k4v, _, _ = deriv(x + dt * k3x, v + dt * k3v, t + dt)
    x_new = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    v_new = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    x_new[3:] = wrap_angle(x_new[3:])
    _require_finite(x_new, v_new, t + dt)
    return CoupledState(x_new, v_new, t + dt), (u1, k1v, mats1)


def interaction_wrenches(
    state: CoupledState,
    u_stack: np.ndarray,
    xddot: np.ndarray,
    obj: ObjectParams,
    agents: list,
    mats: CoupledMatrices | None = None,
) -> np.ndarray:
    """Stacked grasp wrenches implied by (state, input, acceleration).

    Solves the stacked agent dynamics for lambda; feeding the result through
    G^T closes the object's Newton-Euler balance, which is the consistency
    check the tests enforce.
    """
    if mats is None:
        mats = coupled_matrices(state, obj, agents)
    u_stack = np.asarray(u_stack, dtype=float).reshape(6 * len(agents))
    xddot = np.asarray(xddot, dtype=float).reshape(6)
    lam = np.empty(6 * len(agents))
    for i, a in enumerate(agents):
        sl = slice(6 * i, 6 * i + 6)
        jac = mats.grasp[sl]
        jac_dot = mats.grasp_dot[sl]
        lam[sl] = (
            u_stack[sl]
            - a.inertia @ (jac @ xddot + jac_dot @ state.v)
            - a.gravity
            - a.uncertainty.value(state.t)
            - a.disturbance.value(state.t)
        )
    return lam
