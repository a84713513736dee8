"""Hybrid executive: run a timed plan through the closed loop and verify it.

For every plan edge the executive builds the transition trajectory, selects
fresh performance envelopes, and integrates the coupled truth model with the
distributed controller evaluated inside every RK4 stage (the control law is
a continuous state feedback; evaluating it per stage integrates the actual
closed loop instead of a zero-order-hold approximation, which matters
because the funnel gains grow as the envelopes shrink). At every switching
instant it asserts the region-membership definition for the scheduled
region; at every step it logs states, references, envelopes, agent wrenches,
and the interaction wrenches implied by the logged acceleration.

Verification recomputes, from the logged data plus the plan only: the timed
behavior and its formula satisfaction, containment of the body points and of
the conservative system ball inside the closed union of the two active
cells, envelope margins, and the load-sharing identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .control import controller_tick, init_transition
from .dynamics import CoupledState, acceleration, interaction_wrenches, step_controlled
from .errors import RegionAssertionFailed
from .kinematics import euler_to_rotation
from .mitl import TimedWord, satisfies
from .partition import Partition, ball_in_box, system_in_region
from .planner import WTS, Plan
from .scenario import Scenario
from .trajectory import make_transition_trajectory, self_loop_trajectory

CONTAINMENT_SLACK = 1e-9


@dataclass
class ExecutionTrace:
    """Dense per-step log of one executed plan.

    Row i holds the closed-loop state at ``t[i]`` and the controller
    quantities computed there; the final row is the state after the last
    step, with the last transition's controller evaluated at the final time.
    """

    seed: int
    dt: float
    t: np.ndarray  # (n,)
    x: np.ndarray  # (n, 6) object pose
    v: np.ndarray  # (n, 6) object twist
    x_d: np.ndarray  # (n, 6) desired pose
    xdot_star: np.ndarray  # (n, 6) funnel reference velocity
    e_s: np.ndarray  # (n, 6)
    rho_s: np.ndarray  # (n, 6)
    e_v: np.ndarray  # (n, 6)
    rho_v: np.ndarray  # (n, 6)
    u: np.ndarray  # (n, 6N) stacked agent wrenches
    lam: np.ndarray  # (n, 6N) stacked interaction wrenches
    edge: np.ndarray  # (n,) index into `edges`
    edges: list  # (a, b, t_start, duration) per executed transition
    events: list  # (region, t) at every switching instant, including the end

    def columns(self) -> list:
        n_agents = self.u.shape[1] // 6
        cols = ["t"]
        for name in ("x", "v", "x_d", "xdot_star", "e_s", "rho_s", "e_v", "rho_v"):
            cols += [f"{name}[{k}]" for k in range(6)]
        for i in range(n_agents):
            cols += [f"u{i + 1}[{k}]" for k in range(6)]
        for i in range(n_agents):
            cols += [f"lam{i + 1}[{k}]" for k in range(6)]
        cols.append("edge")
        return cols

    def matrix(self) -> np.ndarray:
        return np.column_stack(
            [
                self.t,
                self.x,
                self.v,
                self.x_d,
                self.xdot_star,
                self.e_s,
                self.rho_s,
                self.e_v,
                self.rho_v,
                self.u,
                self.lam,
                self.edge.astype(float),
            ]
        )

    def to_csv(self, path, stride: int = 1) -> None:
        data = self.matrix()[::stride]
        header = (
            f"coopmanip-trace v1 seed={self.seed} dt={self.dt!r} stride={stride}\n"
            + ",".join(self.columns())
        )
        np.savetxt(path, data, delimiter=",", header=header, fmt="%.17g")


def trace_from_csv(path, plan: Plan, scenario: Scenario) -> ExecutionTrace:
    """Rebuild a trace object from its CSV file plus the plan it executed.

    The edge list and switching events are not stored in the CSV; they are
    reconstructed from the plan and the scenario's transition durations.
    """
    with open(path) as fh:
        meta = fh.readline().strip().lstrip("# ")
        fh.readline()  # column header
        data = np.loadtxt(fh, delimiter=",")
    fields = dict(kv.split("=") for kv in meta.split()[2:])
    seed = int(fields["seed"])
    dt = float(fields["dt"])
    stride = int(fields.get("stride", "1"))
    data = np.atleast_2d(data)

    n_agents = len(scenario.agents)
    off = 1
    parts = {}
    for name in ("x", "v", "x_d", "xdot_star", "e_s", "rho_s", "e_v", "rho_v"):
        parts[name] = data[:, off : off + 6]
        off += 6
    u = data[:, off : off + 6 * n_agents]
    off += 6 * n_agents
    lam = data[:, off : off + 6 * n_agents]
    off += 6 * n_agents
    edge_col = data[:, off].astype(int)

    wts = scenario.wts()
    n_edges = int(edge_col.max()) + 1
    prefix_edges = len(plan.prefix) - 1
    loop_len = len(plan.loop)
    periods = (n_edges - prefix_edges) // loop_len if loop_len else 0
    edges = plan.edges(wts, periods)
    if len(edges) != n_edges:
        raise ValueError("trace edge count does not match the plan")
    events = [(a, t0) for a, _, t0, _ in edges]
    events.append((edges[-1][1], edges[-1][2] + edges[-1][3]))

    return ExecutionTrace(
        seed=seed,
        dt=dt * stride,
        t=data[:, 0],
        x=parts["x"],
        v=parts["v"],
        x_d=parts["x_d"],
        xdot_star=parts["xdot_star"],
        e_s=parts["e_s"],
        rho_s=parts["rho_s"],
        e_v=parts["e_v"],
        rho_v=parts["rho_v"],
        u=u,
        lam=lam,
        edge=edge_col,
        edges=list(edges),
        events=events,
    )


def _body_points(x: np.ndarray, grasps) -> np.ndarray:
    """World positions of the grasp points (rod endpoints and midpoint for
    the default rod scenario)."""
    rot = euler_to_rotation(x[3:])
    return np.array([x[:3] + rot @ g.r for g in grasps])


def execute_plan(scenario: Scenario, plan: Plan, loop_periods: int | None = None) -> ExecutionTrace:
    """Simulate the switched closed loop along the plan.

    Raises EnvelopeViolated / EnvelopeViolatedAtStart / RegionAssertionFailed
    (each carrying the offending time) if the run breaks its guarantees.
    """
    scenario.validate()
    partition = scenario.partition()
    wts = scenario.wts(partition)
    rng = np.random.default_rng(scenario.seed)
    obj = scenario.object_params(rng)
    agents = scenario.agent_params(rng)
    grasps = [a.grasp for a in agents]
    gains = scenario.gains()
    env = scenario.envelope_params()
    eta_d = np.array(scenario.eta_d, dtype=float)
    dt = scenario.dt

    if loop_periods is None:
        loop_periods = scenario.loop_periods
    edges = plan.edges(wts, loop_periods)
    for _, _, _, dur in edges:
        steps = dur / dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("every transition duration must be an integer multiple of dt")
    n_rows = int(round(sum(e[3] for e in edges) / dt)) + 1
    n_agents = len(agents)

    x0, v0 = scenario.initial_state(partition)
    state = CoupledState(x0, v0, 0.0)

    buf = {name: np.empty((n_rows, 6)) for name in
           ("x", "v", "x_d", "xdot_star", "e_s", "rho_s", "e_v", "rho_v")}
    buf["u"] = np.empty((n_rows, 6 * n_agents))
    buf["lam"] = np.empty((n_rows, 6 * n_agents))
    t_arr = np.empty(n_rows)
    edge_arr = np.empty(n_rows, dtype=int)
    events = []

    def assert_in_region(region: int, t: float) -> None:
        pts = _body_points(state.x, grasps)
        if not system_in_region(state.x[:3], pts, region, partition):
            dist = float(np.linalg.norm(state.x[:3] - partition.center(region)))
            raise RegionAssertionFailed(
                t, region, f"object at {state.x[:3]}, distance {dist:.6g} from center"
            )
        lo, hi = partition.box(region)
        if not ball_in_box(state.x[:3], scenario.reach, lo, hi, CONTAINMENT_SLACK):
            raise RegionAssertionFailed(t, region, "system ball leaves the region box")

    def log_row(row, t_now, traj, diag, u_now, lam, edge_idx):
        t_arr[row] = t_now
        buf["x"][row] = state.x
        buf["v"][row] = state.v
        buf["x_d"][row] = traj.eval(t_now)[0]
        buf["xdot_star"][row] = diag["xdot_star"]
        buf["e_s"][row] = diag["e_s"]
        buf["rho_s"][row] = diag["rho_s"]
        buf["e_v"][row] = diag["e_v"]
        buf["rho_v"][row] = diag["rho_v"]
        buf["u"][row] = u_now
        buf["lam"][row] = lam
        edge_arr[row] = edge_idx

    row = 0
    traj = cs = None
    for edge_idx, (a, b, t_edge, dur) in enumerate(edges):
        state.t = t_edge
        assert_in_region(a, t_edge)
        events.append((a, t_edge))
        if a == b:
            traj = self_loop_trajectory(partition, a, dur, t_edge, eta_d)
        else:
            traj = make_transition_trajectory(
                partition, a, b, dur, t_edge, eta_d,
                scenario.profile, scenario.ramp_up, scenario.ramp_down,
            )
        cs = init_transition(state.x, state.v, traj, gains, grasps, env, t_edge)

        def control(x, v, t, cs=cs):
            return controller_tick(cs, x, v, t)[0]

        for i in range(int(round(dur / dt))):
            t_now = t_edge + i * dt
            state.t = t_now
            u_now, diag = controller_tick(cs, state.x, state.v, t_now)
            new_state, (u1, xddot1, mats1) = step_controlled(state, control, dt, obj, agents)
            lam = interaction_wrenches(state, u1, xddot1, obj, agents, mats1)
            log_row(row, t_now, traj, diag, u_now, lam, edge_idx)
            row += 1
            state = new_state

    # final switching instant and closing row
    t_end = edges[-1][2] + edges[-1][3]
    state.t = t_end
    assert_in_region(edges[-1][1], t_end)
    events.append((edges[-1][1], t_end))
    u_now, diag = controller_tick(cs, state.x, state.v, t_end)
    xddot, mats = acceleration(state, u_now, obj, agents)
    lam = interaction_wrenches(state, u_now, xddot, obj, agents, mats)
    log_row(row, t_end, traj, diag, u_now, lam, len(edges) - 1)

    return ExecutionTrace(
        seed=scenario.seed,
        dt=dt,
        t=t_arr,
        x=buf["x"],
        v=buf["v"],
        x_d=buf["x_d"],
        xdot_star=buf["xdot_star"],
        e_s=buf["e_s"],
        rho_s=buf["rho_s"],
        e_v=buf["e_v"],
        rho_v=buf["rho_v"],
        u=buf["u"],
        lam=buf["lam"],
        edge=edge_arr,
        edges=list(edges),
        events=events,
    )


# -- verification --------------------------------------------------------------


@dataclass
class Report:
    """Outcome of re-checking a trace against its plan and formula."""

    satisfied: bool
    violations: list  # dicts with kind/t/detail
    envelope_margins: list  # per executed edge: min over steps of rho - |e|
    load_share_max_dev: float
    event_errors: list
    word: TimedWord | None = None

    @property
    def ok(self) -> bool:
        return self.satisfied and not self.violations and not self.event_errors

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": 1,
                "satisfied": self.satisfied,
                "ok": self.ok,
                "violations": self.violations,
                "event_errors": self.event_errors,
                "envelope_margins": self.envelope_margins,
                "load_share_max_dev": self.load_share_max_dev,
            },
            indent=2,
        )


def verify_trace(trace: ExecutionTrace, plan: Plan, scenario: Scenario) -> Report:
    """Recompute every promised property of an executed trace.

    Checks: the timed behavior (labels at the switching instants, extended by
    the plan's loop) satisfies the formula; every logged step keeps the body
    points and the radius-`reach` ball inside the closed union of the two
    active cells (1e-9 slack); every logged step keeps |e| < rho on all
    channels; the load-sharing identity holds whenever the common wrench is
    nonnegligible; switching events hit their scheduled times within one
    integration step.
    """
    partition = scenario.partition()
    wts = scenario.wts(partition)
    formula = scenario.formula()
    grasps = scenario.grasp_offsets()
    violations = []
    event_errors = []

    # Timed behavior: the plan's word, but demand the trace actually realized
    # the plan's switching schedule.
    for k, (region, t_sched) in enumerate(_scheduled_events(plan, wts, trace)):
        if k >= len(trace.events):
            event_errors.append(f"missing switching event #{k} (region {region})")
            continue
        r_obs, t_obs = trace.events[k]
        if r_obs != region:
            event_errors.append(f"event #{k}: region {r_obs} != scheduled {region}")
        if abs(t_obs - t_sched) > trace.dt + 1e-12:
            event_errors.append(f"event #{k}: time {t_obs} != scheduled {t_sched}")
        idx = int(round((t_obs - trace.t[0]) / trace.dt))
        idx = min(max(idx, 0), len(trace.t) - 1)
        pts = _body_points(trace.x[idx], grasps)
        if not system_in_region(trace.x[idx, :3], pts, region, partition):
            event_errors.append(f"event #{k}: system not in region {region} at t={t_obs}")

    word = plan.word(wts)
    satisfied = satisfies(word, formula) and not event_errors

    # Containment and envelopes at every logged step.
    margins = [np.full(12, np.inf) for _ in trace.edges]
    for i in range(len(trace.t)):
        a, b, _, _ = trace.edges[trace.edge[i]]
        lo, hi = partition.union_closure_box(a, b)
        pts = _body_points(trace.x[i], grasps)
        inside = np.all(pts >= lo - CONTAINMENT_SLACK) and np.all(pts <= hi + CONTAINMENT_SLACK)
        if not inside:
            violations.append(
                {"kind": "body-point-containment", "t": float(trace.t[i]), "edge": int(trace.edge[i])}
            )
        if not ball_in_box(trace.x[i, :3], scenario.reach, lo, hi, CONTAINMENT_SLACK):
            violations.append(
                {"kind": "ball-containment", "t": float(trace.t[i]), "edge": int(trace.edge[i])}
            )
        m_s = trace.rho_s[i] - np.abs(trace.e_s[i])
        m_v = trace.rho_v[i] - np.abs(trace.e_v[i])
        margins[trace.edge[i]] = np.minimum(margins[trace.edge[i]], np.concatenate([m_s, m_v]))
        if np.any(m_s <= 0.0) or np.any(m_v <= 0.0):
            violations.append({"kind": "envelope", "t": float(trace.t[i]), "edge": int(trace.edge[i])})

    load_dev = load_share_deviation(trace, scenario)

    return Report(
        satisfied=bool(satisfied),
        violations=violations,
        envelope_margins=[m.min() for m in margins],
        load_share_max_dev=float(load_dev),
        event_errors=event_errors,
        word=word,
    )


def _scheduled_events(plan: Plan, wts: WTS, trace: ExecutionTrace):
    """(region, time) the trace should have hit: plan prefix plus as many
    loop traversals as the trace actually executed."""
    events = list(plan.prefix)
    t = plan.prefix[-1][1]
    prev = plan.prefix[-1][0]
    while len(events) < len(trace.events):
        for b in plan.loop:
            t += wts.duration(prev, b)
            events.append((b, t))
            prev = b
            if len(events) == len(trace.events):
                break
    return events


def load_share_deviation(trace: ExecutionTrace, scenario: Scenario) -> float:
    """Max over the run of the relative spread of J_Oi^T u_i / c_i.

    The control law makes J_Oi^T u_i proportional to the load share c_i with
    one common vector, so the normalized wrenches must coincide across
    agents whenever that common vector is nonnegligible.
    """
    from .kinematics import object_agent_jacobian, object_to_agent_pose

    shares = [a.share for a in scenario.agents]
    grasps = scenario.grasp_offsets()
    worst = 0.0
    for i in range(len(trace.t)):
        x = trace.x[i]
        ref = None
        ref_norm = 0.0
        for k, (g, c) in enumerate(zip(grasps, shares)):
            x_e = object_to_agent_pose(x, g)
            jac = object_agent_jacobian(x_e, x)
            w = jac.T @ trace.u[i, 6 * k : 6 * k + 6] / c
            if ref is None:
                ref = w
                ref_norm = float(np.linalg.norm(w))
            elif ref_norm > 1e-12:
                dev = float(np.linalg.norm(w - ref)) / ref_norm
                worst = max(worst, dev)
    return worst
