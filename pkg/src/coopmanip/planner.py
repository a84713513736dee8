"""Weighted transition system over the partition and timed-plan search.

The workspace partition becomes a finite weighted transition system: states
are regions, transitions connect face-adjacent cells plus a self-loop at
every cell (so finite plans have an infinite continuation), and each
transition carries its fixed duration.

Plan search works on the product of the WTS with the formula's residual
obligations, maintained by timed formula progression: consuming an event
(label set, gap to the next event) rewrites the formula into what the rest
of the word still has to satisfy. Because every duration is fixed, elapsed
time is a function of the path and these residuals take finitely many
values, so a breadth-first search over (region, residual) pairs explores the
whole reachable product. A plan is a shortest path to some product state
together with a cycle through it on which progression never hits false: for
the supported fragment (bounded intervals everywhere, plus unbounded always
at the outermost conjunction level) every bounded obligation on such a cycle
resolves before its deadline, so the induced lasso word satisfies the
formula; the returned plan is re-checked with the monitor anyway.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .errors import InvalidConfig, UnsupportedFragment
from .mitl.formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    FalseF,
    Formula,
    Future,
    Interval,
    Next,
    Not,
    Or,
    TrueF,
    Until,
    f_and,
    f_not,
    f_or,
)
from .mitl.semantics import TimedWord, satisfies
from .partition import Partition


class WTS:
    """Finite weighted transition system induced by a labeled partition."""

    def __init__(self, partition: Partition, durations, labeling: dict | None = None):
        """``durations`` is either a uniform positive float or a mapping
        {(j, j2): dt} with a required ``None`` key as the default."""
        self.partition = partition
        if isinstance(durations, (int, float)):
            self._default_dt = float(durations)
            self._dt_map = {}
        else:
            self._default_dt = float(durations.get(None, 0.0))
            self._dt_map = {k: float(v) for k, v in durations.items() if k is not None}
        self._labels = dict(labeling) if labeling is not None else None
        for (a, b), v in self._dt_map.items():
            if v <= 0.0:
                raise InvalidConfig(f"transition duration for {(a, b)} must be positive")

    @property
    def n_states(self) -> int:
        return len(self.partition)

    def labels(self, j: int) -> frozenset:
        if self._labels is not None:
            return frozenset(self._labels.get(j, frozenset()))
        return self.partition.labels(j)

    def successors(self, j: int) -> list:
        """Outgoing transitions in deterministic order: ascending neighbor
        index, self-loop last."""
        return sorted(self.partition.neighbors(j)) + [j]

    def has_transition(self, a: int, b: int) -> bool:
        return a == b or b in self.partition.neighbors(a)

    def duration(self, a: int, b: int) -> float:
        if not self.has_transition(a, b):
            raise InvalidConfig(f"no transition {a} -> {b}")
        dt = self._dt_map.get((a, b), self._default_dt)
        if dt <= 0.0:
            raise InvalidConfig(f"transition {a} -> {b} has no positive duration")
        return dt

    def transition_count(self) -> int:
        return sum(len(self.partition.neighbors(j)) + 1 for j in range(1, self.n_states + 1))


def build_wts(partition: Partition, durations, labeling: dict | None = None) -> WTS:
    return WTS(partition, durations, labeling)


# -- timed formula progression ----------------------------------------------


def _contains_zero(interval: Interval) -> bool:
    return interval.lo == 0.0 and not interval.lo_open


def progress(formula: Formula, sigma: frozenset, gap: float) -> Formula:
    """Residual obligation after consuming the current event.

    (w, j) |= formula  iff  (w, j+1) |= progress(formula, sigma_j, t_{j+1}-t_j).
    """
    if isinstance(formula, (TrueF, FalseF)):
        return formula
    if isinstance(formula, Atom):
        return TRUE if formula.name in sigma else FALSE
    if isinstance(formula, Not):
        return f_not(progress(formula.child, sigma, gap))
    if isinstance(formula, And):
        return f_and([progress(c, sigma, gap) for c in formula.children])
    if isinstance(formula, Or):
        return f_or([progress(c, sigma, gap) for c in formula.children])
    if isinstance(formula, Next):
        return formula.child if formula.interval.contains(gap) else FALSE
    if isinstance(formula, Future):
        parts = []
        if _contains_zero(formula.interval):
            parts.append(progress(formula.child, sigma, gap))
        shifted = formula.interval.shift(gap)
        if shifted is not None:
            parts.append(Future(formula.child, shifted))
        return f_or(parts)
    if isinstance(formula, Always):
        parts = []
        if _contains_zero(formula.interval):
            parts.append(progress(formula.child, sigma, gap))
        shifted = formula.interval.shift(gap)
        if shifted is not None:
            parts.append(Always(formula.child, shifted))
        return f_and(parts)
    if isinstance(formula, Until):
        guard_now = progress(formula.left, sigma, gap)
        parts = []
        if _contains_zero(formula.interval):
            parts.append(f_and([guard_now, progress(formula.right, sigma, gap)]))
        shifted = formula.interval.shift(gap)
        if shifted is not None:
            parts.append(f_and([guard_now, Until(formula.left, formula.right, shifted)]))
        return f_or(parts)
    raise TypeError(f"not a formula: {formula!r}")


def check_fragment(formula: Formula) -> None:
    """Reject formulas the plan search cannot handle.

    Allowed: bounded intervals everywhere; additionally, always-operators
    with an unbounded interval at the outermost conjunction level (their
    bodies must be bounded).
    """
    conjuncts = formula.children if isinstance(formula, And) else (formula,)
    for c in conjuncts:
        if isinstance(c, Always) and not c.interval.bounded:
            _require_bounded(c.child)
        else:
            _require_bounded(c)


def _require_bounded(f: Formula) -> None:
    if isinstance(f, (TrueF, FalseF, Atom)):
        return
    if isinstance(f, Not):
        _require_bounded(f.child)
        return
    if isinstance(f, (And, Or)):
        for c in f.children:
            _require_bounded(c)
        return
    if isinstance(f, (Next, Future, Always)):
        if not f.interval.bounded:
            raise UnsupportedFragment(
                f"unbounded interval in {f.text()} is only supported as an outermost always"
            )
        _require_bounded(f.child)
        return
    if isinstance(f, Until):
        if not f.interval.bounded:
            raise UnsupportedFragment(
                f"unbounded interval in {f.text()} is only supported as an outermost always"
            )
        _require_bounded(f.left)
        _require_bounded(f.right)
        return
    raise TypeError(f"not a formula: {f!r}")


# -- plans --------------------------------------------------------------------


@dataclass(frozen=True)
class Plan:
    """Timed lasso run: prefix of (region, time) pairs plus a repeated loop.

    The loop region list ends at the same region the prefix ends at, so the
    repetition closes on itself.
    """

    prefix: tuple  # ((region, t), ...)
    loop: tuple  # (region, ...), loop[-1] == prefix[-1][0]

    def __post_init__(self):
        object.__setattr__(
            self, "prefix", tuple((int(r), float(t)) for r, t in self.prefix)
        )
        object.__setattr__(self, "loop", tuple(int(r) for r in self.loop))

    @property
    def regions(self) -> tuple:
        return tuple(r for r, _ in self.prefix)

    def edges(self, wts: WTS, loop_periods: int = 1):
        """Timed edges (a, b, t_start, duration) covering the prefix and
        ``loop_periods`` traversals of the loop."""
        out = []
        seq = [r for r, _ in self.prefix]
        t = self.prefix[0][1]
        for a, b in zip(seq, seq[1:]):
            d = wts.duration(a, b)
            out.append((a, b, t, d))
            t += d
        anchor = seq[-1]
        for _ in range(loop_periods):
            prev = anchor
            for b in self.loop:
                d = wts.duration(prev, b)
                out.append((prev, b, t, d))
                t += d
                prev = b
        return out

    def word(self, wts: WTS) -> TimedWord:
        """Timed word generated by the run (labels at the timed positions)."""
        prefix = tuple((wts.labels(r), t) for r, t in self.prefix)
        gaps = []
        prev = self.prefix[-1][0]
        for b in self.loop:
            gaps.append((wts.labels(b), wts.duration(prev, b)))
            prev = b
        return TimedWord(prefix, tuple(gaps))


def plan_to_json(plan: Plan) -> str:
    return json.dumps(
        {
            "version": 1,
            "prefix": [{"region": r, "t": t} for r, t in plan.prefix],
            "loop": list(plan.loop),
        },
        indent=2,
    )


def plan_from_json(text: str) -> Plan:
    data = json.loads(text)
    if data.get("version") != 1:
        raise InvalidConfig("unsupported plan file version")
    return Plan(
        tuple((e["region"], e["t"]) for e in data["prefix"]),
        tuple(data["loop"]),
    )


# -- search -------------------------------------------------------------------


def find_accepting_run(wts: WTS, formula: Formula, initial_region: int):
    """Shortest-prefix timed lasso whose word satisfies the formula, or None.

    Deterministic: BFS over (region, residual) with ascending-neighbor edge
    order (self-loop last), then the shortest never-false cycle from the
    earliest discovered state; the result is re-validated with the monitor.
    """
    check_fragment(formula)
    if not 1 <= initial_region <= wts.n_states:
        raise InvalidConfig(f"initial region {initial_region} not in the partition")

    start = (initial_region, formula)
    order = []  # discovery order
    parents = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        order.append(node)
        for nxt in _successors(wts, node):
            if nxt not in parents:
                parents[nxt] = node
                queue.append(nxt)

    for node in order:
        cycle = _shortest_cycle(wts, node)
        if cycle is None:
            continue
        prefix_regions = _path_to(parents, node)
        plan = _assemble_plan(wts, prefix_regions, cycle)
        if validate_plan(plan, wts, formula):
            return plan
    return None


def _progressed(wts: WTS, node, nxt_region: int) -> Formula:
    region, residual = node
    gap = wts.duration(region, nxt_region)
    return progress(residual, wts.labels(region), gap)


def _successors(wts: WTS, node):
    region, _ = node
    out = []
    for nxt in wts.successors(region):
        res = _progressed(wts, node, nxt)
        if res != FALSE:
            out.append((nxt, res))
    return out


def _shortest_cycle(wts: WTS, node):
    """Shortest never-false product cycle from node back to itself."""
    parents = {}
    queue = deque()
    for nxt in _successors(wts, node):
        if nxt == node:
            return [node[0]]  # immediate self-loop in the product
        if nxt not in parents:
            parents[nxt] = None
            queue.append(nxt)
    while queue:
        cur = queue.popleft()
        for nxt in _successors(wts, cur):
            if nxt == node:
                path = [cur]
                while parents[cur] is not None:
                    cur = parents[cur]
                    path.append(cur)
                return [r for r, _ in reversed(path)] + [node[0]]
            if nxt not in parents:
                parents[nxt] = cur
                queue.append(nxt)
    return None


def _path_to(parents, node):
    path = [node]
    while parents[path[-1]] is not None:
        path.append(parents[path[-1]])
    return [r for r, _ in reversed(path)]


def _assemble_plan(wts: WTS, prefix_regions, cycle_regions) -> Plan:
    t = 0.0
    prefix = [(prefix_regions[0], 0.0)]
    for a, b in zip(prefix_regions, prefix_regions[1:]):
        t += wts.duration(a, b)
        prefix.append((b, t))
    return Plan(tuple(prefix), tuple(cycle_regions))


def plan_validation_errors(plan: Plan, wts: WTS, formula: Formula) -> list:
    """Structural and semantic problems with a plan; empty when valid."""
    errors = []
    if not plan.prefix:
        return ["plan has an empty prefix"]
    if plan.prefix[0][1] != 0.0:
        errors.append("plan must start at t = 0")
    regions = [r for r, _ in plan.prefix]
    times = [t for _, t in plan.prefix]
    for (a, ta), (b, tb) in zip(plan.prefix, plan.prefix[1:]):
        if not wts.has_transition(a, b):
            errors.append(f"no transition {a} -> {b}")
            continue
        if abs((tb - ta) - wts.duration(a, b)) > 1e-9:
            errors.append(f"timestamp gap {tb - ta:g} != duration of {a} -> {b}")
    if not plan.loop:
        errors.append("plan needs a nonempty loop")
    else:
        if plan.loop[-1] != regions[-1]:
            errors.append("loop must end at the region the prefix ends at")
        prev = regions[-1]
        for b in plan.loop:
            if not wts.has_transition(prev, b):
                errors.append(f"no loop transition {prev} -> {b}")
            prev = b
    if any(tb <= ta for ta, tb in zip(times, times[1:])):
        errors.append("timestamps must be strictly increasing")
    if errors:
        return errors
    if not satisfies(plan.word(wts), formula):
        errors.append("the generated timed word does not satisfy the formula")
    return errors


def validate_plan(plan: Plan, wts: WTS, formula: Formula) -> bool:
    """True iff structurally valid and the generated word satisfies the formula."""
    return not plan_validation_errors(plan, wts, formula)
