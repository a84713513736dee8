"""Rotation/Euler-angle machinery and the rigid-grasp kinematic coupling.

Conventions used throughout the package:

* Euler angles ``eta = [roll, pitch, yaw]`` (ZYX): ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
* Angles are wrapped to ``(-pi, pi]`` after every addition.
* The analytic Jacobian ``J(eta)`` maps Euler-angle rates to the world-frame
  angular velocity, ``omega = J(eta) @ eta_dot``; it is singular exactly when
  ``|cos(pitch)| = 0``.
* A pose is a 6-vector ``[p, eta]``; a twist is ``[p_dot, eta_dot]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularOrientation

# |cos(pitch)| below this is treated as a representation singularity.
SINGULARITY_TOL = 1e-6

TWO_PI = 2.0 * np.pi


def wrap_angle(a):
    """Wrap angles (scalar or array) to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), TWO_PI)


def skew(a: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix S(a) with S(a) @ b = a x b."""
    x, y, z = a
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def euler_to_rotation(eta: np.ndarray) -> np.ndarray:
    """Rotation matrix for ZYX Euler angles [roll, pitch, yaw]."""
    cr, sr = np.cos(eta[0]), np.sin(eta[0])
    cp, sp = np.cos(eta[1]), np.sin(eta[1])
    cy, sy = np.cos(eta[2]), np.sin(eta[2])
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def analytic_jacobian(eta: np.ndarray) -> np.ndarray:
    """Euler-rate Jacobian J with omega = J(eta) @ eta_dot.

    Columns are the world-frame axes about which roll/pitch/yaw rates act
    for the ZYX convention; det(J) = cos(pitch).

    Raises:
        SingularOrientation: when |cos(pitch)| < SINGULARITY_TOL.
    """
    cp, sp = np.cos(eta[1]), np.sin(eta[1])
    if abs(cp) < SINGULARITY_TOL:
        raise SingularOrientation(f"pitch {eta[1]:.6g} rad is within tolerance of +-pi/2")
    cy, sy = np.cos(eta[2]), np.sin(eta[2])
    return np.array([[cp * cy, -sy, 0.0], [cp * sy, cy, 0.0], [-sp, 0.0, 1.0]])


def analytic_jacobian_inv(eta: np.ndarray) -> np.ndarray:
    """Closed-form inverse of :func:`analytic_jacobian`."""
    cp, sp = np.cos(eta[1]), np.sin(eta[1])
    if abs(cp) < SINGULARITY_TOL:
        raise SingularOrientation(f"pitch {eta[1]:.6g} rad is within tolerance of +-pi/2")
    cy, sy = np.cos(eta[2]), np.sin(eta[2])
    t = sp / cp
    return np.array([[cy / cp, sy / cp, 0.0], [-sy, cy, 0.0], [cy * t, sy * t, 1.0]])


def analytic_jacobian_dot(eta: np.ndarray, eta_dot: np.ndarray) -> np.ndarray:
    """Time derivative of the Euler-rate Jacobian along (eta, eta_dot)."""
    cp, sp = np.cos(eta[1]), np.sin(eta[1])
    cy, sy = np.cos(eta[2]), np.sin(eta[2])
    dp, dy = eta_dot[1], eta_dot[2]
    return np.array(
        [
            [-sp * dp * cy - cp * sy * dy, -cy * dy, 0.0],
            [-sp * dp * sy + cp * cy * dy, -sy * dy, 0.0],
            [-cp * dp, 0.0, 0.0],
        ]
    )


@dataclass(frozen=True)
class GraspOffset:
    """Constant offset of a grasp point from the object center.

    ``r`` is the grasp position in the object frame (m); ``alpha`` is the
    constant angular offset between object and end-effector orientation (rad).
    """

    r: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float).reshape(3))
        object.__setattr__(self, "alpha", wrap_angle(np.asarray(self.alpha, dtype=float).reshape(3)))


@dataclass(frozen=True)
class Pose:
    """Position (m) + ZYX Euler orientation (rad) of a rigid body."""

    p: np.ndarray
    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))
        object.__setattr__(self, "eta", wrap_angle(np.asarray(self.eta, dtype=float).reshape(3)))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.eta])

    @staticmethod
    def from_vector(x: np.ndarray) -> "Pose":
        x = np.asarray(x, dtype=float).reshape(6)
        return Pose(x[:3], x[3:])


def object_to_agent_pose(x_obj: np.ndarray, grasp: GraspOffset) -> np.ndarray:
    """End-effector pose vector implied by the object pose and a rigid grasp.

    p_E = p_O + R(eta_O) @ r,  eta_E = wrap(eta_O + alpha).
    """
    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    p = x_obj[:3] + euler_to_rotation(x_obj[3:]) @ grasp.r
    return np.concatenate([p, wrap_angle(x_obj[3:] + grasp.alpha)])


def object_agent_jacobian(x_agent: np.ndarray, x_obj: np.ndarray) -> np.ndarray:
    """6x6 Jacobian mapping object twist to end-effector twist.

    [[I, S(p_O - p_E) @ J_O], [0, inv(J_E) @ J_O]]; invertible away from
    representation singularities.
    """
    x_agent = np.asarray(x_agent, dtype=float).reshape(6)
    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    j_obj = analytic_jacobian(x_obj[3:])
    j_agent_inv = analytic_jacobian_inv(x_agent[3:])
    out = np.zeros((6, 6))
    out[:3, :3] = np.eye(3)
    out[:3, 3:] = skew(x_obj[:3] - x_agent[:3]) @ j_obj
    out[3:, 3:] = j_agent_inv @ j_obj
    return out


def object_agent_jacobian_dot(
    x_obj: np.ndarray, v_obj: np.ndarray, grasp: GraspOffset
) -> np.ndarray:
    """Time derivative of :func:`object_agent_jacobian` along an object twist."""
    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    v_obj = np.asarray(v_obj, dtype=float).reshape(6)
    eta, eta_dot = x_obj[3:], v_obj[3:]
    j_obj = analytic_jacobian(eta)
    j_obj_dot = analytic_jacobian_dot(eta, eta_dot)
    omega = j_obj @ eta_dot

    # Grasp rigidity: p_O - p_E = -R @ r rotates with the object.
    rel = -(euler_to_rotation(eta) @ grasp.r)
    rel_dot = np.cross(omega, rel)

    eta_agent = wrap_angle(eta + grasp.alpha)
    j_agent_inv = analytic_jacobian_inv(eta_agent)
    # eta_E = eta_O + alpha with constant alpha, so eta_E evolves at eta_dot.
    j_agent_dot = analytic_jacobian_dot(eta_agent, eta_dot)
    # d/dt inv(J_E) = -inv(J_E) @ dJ_E @ inv(J_E)
    j_agent_inv_dot = -j_agent_inv @ j_agent_dot @ j_agent_inv

    out = np.zeros((6, 6))
    out[:3, 3:] = skew(rel_dot) @ j_obj + skew(rel) @ j_obj_dot
    out[3:, 3:] = j_agent_inv_dot @ j_obj + j_agent_inv @ j_obj_dot
    return out


def grasp_matrix(x_obj: np.ndarray, grasps: list) -> np.ndarray:
    """Stacked 6N x 6 grasp matrix; row-block i is the object->agent-i Jacobian.

    Full column rank by grasp rigidity: transposed it maps stacked agent
    wrenches to the object wrench.
    """
    if not grasps:
        raise ValueError("grasp_matrix needs at least one agent")
    x_obj = np.asarray(x_obj, dtype=float).reshape(6)
    blocks = []
    for g in grasps:
        x_e = object_to_agent_pose(x_obj, g)
        blocks.append(object_agent_jacobian(x_e, x_obj))
    return np.vstack(blocks)
