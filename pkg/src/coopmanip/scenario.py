"""Scenario definition: everything one end-to-end run needs, in one place.

A scenario couples the workspace partition and labeling, the agents' grasp
geometry and load shares, the truth-model parameters (which only the
simulator sees), the controller gains and envelope recipe, the MITL formula,
and the run settings (dt, seed, trajectory profile, loop periods).

Scenarios load from TOML or JSON files; :func:`default_scenario` builds the
benchmark workspace (4x4 grid, three agents on a 0.4 m rod, blue/green goal
regions and two obstacle cells) programmatically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .control import ControllerGains, EnvelopeParams
from .dynamics import AgentParams, ObjectParams, Sinusoid6, check_shares
from .errors import InvalidConfig
from .kinematics import GraspOffset
from .mitl import Formula, parse
from .partition import Partition, PartitionConfig, build_partition
from .planner import WTS, build_wts


@dataclass(frozen=True)
class AgentSpec:
    """Per-agent configuration (geometry, share, truth-model terms)."""

    grasp_r: tuple
    grasp_alpha: tuple
    share: float
    inertia_trans: float = 1.5  # kg, isotropic translational task-space inertia
    inertia_rot: float = 1.2  # kg m^2
    gravity: tuple = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    disturbance_amp: tuple = (0.0,) * 6
    disturbance_omega: tuple = (0.0,) * 6
    uncertainty_amp: tuple = (0.0,) * 6
    uncertainty_omega: tuple = (0.0,) * 6


@dataclass(frozen=True)
class Scenario:
    # workspace
    reach: float
    tube: float
    nx: int
    ny: int
    origin_center: tuple
    labels: dict  # region index -> tuple of proposition names
    # task
    formula_text: str
    delta_t: float
    initial_region: int
    # bodies
    object_mass: float
    object_inertia_diag: tuple
    object_disturbance_amp: tuple
    object_disturbance_omega: tuple
    agents: tuple
    g0: float = 9.81
    # controller
    g_s: tuple = (0.1,) * 6
    g_v: float = 2.5
    rho_inf_s: float = 0.15
    decay_s: float = 0.3
    rho0_s_rot: float = 0.5
    rho_inf_v: float = 0.04
    decay_v: float = 1.0
    conservative_envelopes: bool = True
    eta_d: tuple = (0.0, 0.0, 0.0)
    # run settings
    dt: float = 1e-3
    seed: int = 7
    profile: str = "cruise"
    ramp_up: float = 1.0
    ramp_down: float = 0.4
    loop_periods: int = 1
    initial_pose: tuple | None = None  # defaults to the initial region center
    initial_velocity: tuple = (0.0,) * 6

    # -- builders ----------------------------------------------------------

    def partition_config(self) -> PartitionConfig:
        return PartitionConfig(self.reach, self.tube, self.nx, self.ny, np.array(self.origin_center))

    def partition(self) -> Partition:
        labeling = {int(j): frozenset(v) for j, v in self.labels.items()}
        return build_partition(self.partition_config(), labeling)

    def wts(self, partition: Partition | None = None) -> WTS:
        return build_wts(partition or self.partition(), self.delta_t)

    def formula(self) -> Formula:
        return parse(self.formula_text)

    def object_params(self, rng: np.random.Generator) -> ObjectParams:
        return ObjectParams(
            self.object_mass,
            np.diag(self.object_inertia_diag),
            self.g0,
            _sinusoid(self.object_disturbance_amp, self.object_disturbance_omega, rng),
        )

    def agent_params(self, rng: np.random.Generator) -> list:
        out = []
        for spec in self.agents:
            inertia = np.diag([spec.inertia_trans] * 3 + [spec.inertia_rot] * 3)
            out.append(
                AgentParams(
                    inertia=inertia,
                    gravity=np.array(spec.gravity, dtype=float),
                    grasp=GraspOffset(np.array(spec.grasp_r), np.array(spec.grasp_alpha)),
                    share=spec.share,
                    uncertainty=_sinusoid(spec.uncertainty_amp, spec.uncertainty_omega, rng),
                    disturbance=_sinusoid(spec.disturbance_amp, spec.disturbance_omega, rng),
                )
            )
        check_shares(out)
        return out

    def grasp_offsets(self) -> list:
        return [
            GraspOffset(np.array(a.grasp_r), np.array(a.grasp_alpha)) for a in self.agents
        ]

    def gains(self) -> ControllerGains:
        return ControllerGains(np.array(self.g_s), self.g_v, np.array([a.share for a in self.agents]))

    def envelope_params(self) -> EnvelopeParams:
        return EnvelopeParams(
            tube=self.tube,
            rho_inf_s=self.rho_inf_s,
            decay_s=self.decay_s,
            rho0_s_rot=self.rho0_s_rot,
            rho_inf_v=self.rho_inf_v,
            decay_v=self.decay_v,
            conservative=self.conservative_envelopes,
        )

    def initial_state(self, partition: Partition):
        if self.initial_pose is not None:
            x0 = np.array(self.initial_pose, dtype=float)
        else:
            x0 = np.concatenate([partition.center(self.initial_region), np.zeros(3)])
        return x0, np.array(self.initial_velocity, dtype=float)

    def validate(self) -> None:
        if self.dt <= 0.0 or self.dt > 1e-2:
            raise InvalidConfig("dt must lie in (0, 1e-2]")
        if self.delta_t <= 0.0:
            raise InvalidConfig("delta_t must be positive")
        steps = self.delta_t / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise InvalidConfig("delta_t must be an integer multiple of dt")
        if self.rho_inf_v >= 0.1:
            raise InvalidConfig("rho_inf_v must stay below the 0.1 floor of rho0_v")
        if self.profile == "cruise":
            if self.ramp_up <= 0.0 or self.ramp_down <= 0.0:
                raise InvalidConfig("cruise ramps must be positive")
            if self.ramp_up + self.ramp_down > self.delta_t:
                raise InvalidConfig("cruise ramps must fit inside delta_t")
        self.partition()  # validates geometry
        self.formula()  # validates formula text
        shares = [a.share for a in self.agents]
        if abs(sum(shares) - 1.0) > 1e-12:
            raise InvalidConfig("agent load shares must sum to 1")


def _sinusoid(amp, omega, rng: np.random.Generator) -> Sinusoid6:
    """Sinusoid with configured amplitude/frequency and seeded phases.

    Phases are always drawn (in a fixed order) even for zero amplitudes so
    that adding a disturbance does not reshuffle every other phase.
    """
    phase = rng.uniform(0.0, 2.0 * math.pi, size=6)
    return Sinusoid6(np.asarray(amp, dtype=float), np.asarray(omega, dtype=float), phase)


def default_scenario(**overrides) -> Scenario:
    """Benchmark scenario: 4x4 grid, three agents carrying a 0.4 m rod.

    Truth-model and envelope constants are tuned so that the pinned gains
    (g_s = 0.1, g_v = 2.5) keep every envelope strictly satisfied at
    dt = 1e-3 with the closed-loop RK4 integration; see the README for the
    reasoning about profile and envelope floors.
    """
    base = dict(
        reach=1.5,
        tube=0.5,
        nx=4,
        ny=4,
        origin_center=(2.0, 2.0, 2.0),
        labels={5: ("blue",), 14: ("green",), 6: ("obs",), 10: ("obs",)},
        formula_text="G[0,inf) !obs & F[0,50] (green & F[0,20] blue)",
        delta_t=5.0,
        initial_region=1,
        object_mass=1.0,
        object_inertia_diag=(0.1, 0.1, 0.1),
        object_disturbance_amp=(0.3, 0.3, 0.3, 0.05, 0.05, 0.05),
        object_disturbance_omega=(0.7, 0.9, 1.1, 0.5, 0.8, 0.6),
        agents=(
            AgentSpec(
                grasp_r=(-0.2, 0.0, 0.0),
                grasp_alpha=(0.0, 0.0, 0.0),
                share=0.5,
                disturbance_amp=(0.2,) * 3 + (0.05,) * 3,
                disturbance_omega=(0.6, 1.0, 0.8, 0.9, 0.7, 1.2),
                uncertainty_amp=(0.2,) * 3 + (0.05,) * 3,
                uncertainty_omega=(1.3, 0.4, 0.9, 0.6, 1.1, 0.5),
            ),
            AgentSpec(
                grasp_r=(0.2, 0.0, 0.0),
                grasp_alpha=(0.0, 0.0, math.pi),
                share=0.35,
                disturbance_amp=(0.2,) * 3 + (0.05,) * 3,
                disturbance_omega=(0.8, 0.5, 1.1, 0.7, 1.0, 0.9),
                uncertainty_amp=(0.2,) * 3 + (0.05,) * 3,
                uncertainty_omega=(0.9, 1.2, 0.6, 1.0, 0.5, 0.8),
            ),
            AgentSpec(
                grasp_r=(0.0, 0.0, 0.0),
                grasp_alpha=(0.0, 0.0, -math.pi / 2.0),
                share=0.15,
                disturbance_amp=(0.2,) * 3 + (0.05,) * 3,
                disturbance_omega=(1.1, 0.7, 0.9, 0.8, 0.6, 1.0),
                uncertainty_amp=(0.2,) * 3 + (0.05,) * 3,
                uncertainty_omega=(0.5, 0.8, 1.2, 0.9, 1.1, 0.7),
            ),
        ),
    )
    base.update(overrides)
    if "agents" in base and base["agents"] and isinstance(base["agents"][0], dict):
        base["agents"] = tuple(AgentSpec(**a) for a in base["agents"])
    return Scenario(**base)


# -- file I/O -----------------------------------------------------------------


def scenario_from_dict(data: dict) -> Scenario:
    data = dict(data)
    if "labels" in data:
        data["labels"] = {int(k): tuple(v) for k, v in data["labels"].items()}
    if "agents" in data:
        data["agents"] = tuple(AgentSpec(**_tupled(a)) for a in data["agents"])
    for key in (
        "origin_center",
        "object_inertia_diag",
        "object_disturbance_amp",
        "object_disturbance_omega",
        "g_s",
        "eta_d",
        "initial_pose",
        "initial_velocity",
    ):
        if key in data and data[key] is not None:
            data[key] = tuple(data[key])
    scenario = Scenario(**data)
    scenario.validate()
    return scenario


def _tupled(d: dict) -> dict:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(text)
    elif path.suffix == ".json":
        data = json.loads(text)
    else:
        raise InvalidConfig(f"unsupported scenario format {path.suffix!r} (use .toml or .json)")
    return scenario_from_dict(data)
