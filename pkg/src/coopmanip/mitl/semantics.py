"""Point-wise MITL semantics over (possibly lasso-shaped) timed words.

A timed word is a finite prefix of (proposition-set, absolute time) events,
optionally followed by a loop of (proposition-set, time gap) events repeated
forever. Formula truth at a loop position depends only on the relative time
structure of the future, which is identical for equal loop phases, so
evaluation memoizes on (formula, canonical position) and terminates:

* bounded operators scan events until the interval's upper bound is passed;
* unbounded operators scan until the lower bound is passed and then one full
  loop period more; if nothing changed in that period, nothing ever will.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnboundedUndecidable
from .formula import (
    Always,
    And,
    Atom,
    FalseF,
    Formula,
    Future,
    Next,
    Not,
    Or,
    TrueF,
    Until,
    f_not,
)

_MAX_SCAN = 1_000_000  # defensive cap on positions visited by one quantifier


@dataclass(frozen=True)
class TimedWord:
    """Finite or lasso-shaped timed word with strictly increasing timestamps."""

    prefix: tuple  # ((frozenset, t_abs), ...), nonempty
    loop: tuple = ()  # ((frozenset, dt_gap), ...) repeated forever; may be empty

    def __post_init__(self):
        prefix = tuple((frozenset(s), float(t)) for s, t in self.prefix)
        loop = tuple((frozenset(s), float(d)) for s, d in self.loop)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "loop", loop)
        if not prefix:
            raise ValueError("timed word needs a nonempty prefix")
        times = [t for _, t in prefix]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("prefix timestamps must be strictly increasing")
        if any(d <= 0.0 for _, d in loop):
            raise ValueError("loop gaps must be positive")

    @property
    def infinite(self) -> bool:
        return bool(self.loop)

    @property
    def period(self) -> float:
        return sum(d for _, d in self.loop)

    def has(self, j: int) -> bool:
        """Whether position j (1-based) exists."""
        return j >= 1 and (self.infinite or j <= len(self.prefix))

    def sigma(self, j: int) -> frozenset:
        n = len(self.prefix)
        if j <= n:
            return self.prefix[j - 1][0]
        return self.loop[(j - n - 1) % len(self.loop)][0]

    def time(self, j: int) -> float:
        n = len(self.prefix)
        if j <= n:
            return self.prefix[j - 1][1]
        cycle, phase = divmod(j - n - 1, len(self.loop))
        t = self.prefix[-1][1] + cycle * self.period
        for _, d in self.loop[: phase + 1]:
            t += d
        return t

    def canonical(self, j: int) -> int:
        """Smallest position with identical future structure (loop phase)."""
        n = len(self.prefix)
        if j <= n:
            return j
        return n + 1 + (j - n - 1) % len(self.loop)


def satisfies(word: TimedWord, formula: Formula, j: int = 1) -> bool:
    """Point-wise satisfaction (word, j) |= formula; positions are 1-based."""
    if j < 1:
        raise ValueError("positions are 1-based")
    if not word.has(j):
        raise ValueError(f"position {j} beyond the end of a finite word")
    return _Evaluator(word).sat(formula, j)


class _Evaluator:
    def __init__(self, word: TimedWord):
        self.word = word
        self.memo = {}

    def sat(self, f: Formula, j: int) -> bool:
        key = (f, self.word.canonical(j))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self._eval(f, key[1])
        self.memo[key] = out
        return out

    def _eval(self, f: Formula, j: int) -> bool:
        w = self.word
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Atom):
            return f.name in w.sigma(j)
        if isinstance(f, Not):
            return not self.sat(f.child, j)
        if isinstance(f, And):
            return all(self.sat(c, j) for c in f.children)
        if isinstance(f, Or):
            return any(self.sat(c, j) for c in f.children)
        if isinstance(f, Next):
            if not w.has(j + 1):
                return False
            gap = w.time(j + 1) - w.time(j)
            return f.interval.contains(gap) and self.sat(f.child, j + 1)
        if isinstance(f, Future):
            return self._scan_exists(j, f.interval, f.child, guard=None)
        if isinstance(f, Until):
            return self._scan_exists(j, f.interval, f.right, guard=f.left)
        if isinstance(f, Always):
            return not self._scan_exists(j, f.interval, f_not(f.child), guard=None)
        raise TypeError(f"not a formula: {f!r}")

    def _scan_exists(self, j: int, interval, target: Formula, guard) -> bool:
        """Exists k >= j with gap in the interval, target at k, and (for
        until) the guard at every position from j through k inclusive."""
        w = self.word
        t0 = w.time(j)
        loop_len = len(w.loop)
        in_zone_count = 0
        k = j
        for _ in range(_MAX_SCAN):
            if not w.has(k):
                return False  # finite word exhausted
            gap = w.time(k) - t0
            past_hi = gap > interval.hi or (gap == interval.hi and interval.hi_open)
            if past_hi:
                return False
            if guard is not None and not self.sat(guard, k):
                return False  # until guard broken before any witness
            if interval.contains(gap) and self.sat(target, k):
                return True
            if not interval.bounded:
                # Once past the lower bound and inside the loop, one full
                # period with no change means no change ever (periodicity).
                above_lo = gap > interval.lo if interval.lo_open else gap >= interval.lo
                if above_lo and loop_len and k > len(w.prefix):
                    in_zone_count += 1
                    if in_zone_count > loop_len:
                        return False
            k += 1
        raise UnboundedUndecidable("scan exceeded the defensive position cap")
