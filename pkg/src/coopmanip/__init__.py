"""Cooperative multi-robot object transport under timed temporal-logic tasks.

The package simulates N robotic agents rigidly grasping one object, drives
the coupled system with a distributed model-free prescribed-performance
controller, abstracts the workspace into a weighted transition system, and
plans, executes, and monitors accepting runs for MITL specifications.
"""

from . import control, dynamics, executive, kinematics, mitl, partition, planner, trajectory
from .errors import (
    CoopManipError,
    EnvelopeViolated,
    EnvelopeViolatedAtStart,
    FormulaSyntaxError,
    InvalidConfig,
    NonFiniteState,
    NotAdjacent,
    RegionAssertionFailed,
    SingularOrientation,
    UnsupportedFragment,
)
from .executive import ExecutionTrace, Report, execute_plan, verify_trace
from .planner import Plan, build_wts, find_accepting_run, validate_plan
from .scenario import Scenario, default_scenario, load_scenario

__version__ = "0.1.0"
