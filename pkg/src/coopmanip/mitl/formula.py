"""MITL formula AST over atomic propositions, with canonical text form.

Operators: atoms, negation, n-ary conjunction/disjunction, and the timed
operators next / future / always / until. Every timed operator carries an
interval with nonnegative bounds, open or closed on each side; an omitted
interval in the concrete syntax means [0, inf).

Smart constructors flatten, deduplicate and sort conjunctions/disjunctions by
their canonical text and perform constant folding; this keeps ASTs hashable
and canonical, which the planner relies on for state dedup and deterministic
tie-breaking.

Concrete syntax (ASCII): ``! & | X F G U`` with precedence
``! > X,F,G > & > | > U``; intervals as ``[0,50]``, ``(2,4]``, ``[1,inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Interval:
    """Real interval with nonnegative lower bound; upper may be inf (open)."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo < 0.0:
            raise ValueError("interval bounds must be nonnegative")
        if self.hi < self.lo:
            raise ValueError(
                f"interval upper bound must not precede lower bound, got [{self.lo}, {self.hi}]"
            )
        # Degenerate point intervals [a,a] are allowed (closed on both sides);
        # they arise from shifting and denote "at exactly a".
        if self.hi == self.lo and (self.lo_open or self.hi_open):
            raise ValueError("interval is empty")
        if math.isinf(self.hi) and not self.hi_open:
            raise ValueError("an infinite upper bound must be open")

    @property
    def bounded(self) -> bool:
        return not math.isinf(self.hi)

    def contains(self, x: float) -> bool:
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below

    def shift(self, d: float):
        """Interval of admissible offsets one event later, or None if empty.

        Negative lower bounds are clamped to a closed 0 (future offsets are
        never negative), keeping shifted intervals canonical.
        """
        hi = self.hi - d
        if hi < 0.0 or (hi == 0.0 and self.hi_open):
            return None
        lo = self.lo - d
        lo_open = self.lo_open
        if lo < 0.0:
            lo, lo_open = 0.0, False
        return Interval(lo, hi, lo_open, self.hi_open)

    def text(self) -> str:
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        hi = "inf" if math.isinf(self.hi) else _fmt_num(self.hi)
        return f"{lb}{_fmt_num(self.lo)},{hi}{rb}"


UNBOUNDED = Interval(0.0, math.inf, False, True)


def _fmt_num(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(x)


class Formula:
    """Base class; subclasses are frozen dataclasses compared by value."""

    __slots__ = ()

    def text(self) -> str:
        return _render(self, 0)

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple


@dataclass(frozen=True)
class Or(Formula):
    children: tuple


@dataclass(frozen=True)
class Next(Formula):
    child: Formula
    interval: Interval = field(default=UNBOUNDED)


@dataclass(frozen=True)
class Future(Formula):
    child: Formula
    interval: Interval = field(default=UNBOUNDED)


@dataclass(frozen=True)
class Always(Formula):
    child: Formula
    interval: Interval = field(default=UNBOUNDED)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Interval = field(default=UNBOUNDED)


def f_not(f: Formula) -> Formula:
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.child
    return Not(f)


def _gather(items, cls, absorb, neutral):
    out = []
    for f in items:
        if isinstance(f, cls):
            out.extend(f.children)
        elif isinstance(f, type(absorb)) and f == absorb:
            return None
        elif isinstance(f, type(neutral)) and f == neutral:
            continue
        else:
            out.append(f)
    return out


def f_and(items) -> Formula:
    flat = _gather(items, And, FALSE, TRUE)
    if flat is None:
        return FALSE
    uniq = sorted(set(flat), key=lambda f: f.text())
    if not uniq:
        return TRUE
    if len(uniq) == 1:
        return uniq[0]
    return And(tuple(uniq))


def f_or(items) -> Formula:
    flat = _gather(items, Or, TRUE, FALSE)
    if flat is None:
        return TRUE
    uniq = sorted(set(flat), key=lambda f: f.text())
    if not uniq:
        return FALSE
    if len(uniq) == 1:
        return uniq[0]
    return Or(tuple(uniq))


# Precedence levels for printing: U < | < & < unary < atom.
_PREC_UNTIL, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(f: Formula) -> int:
    if isinstance(f, (Atom, TrueF, FalseF)):
        return _PREC_ATOM
    if isinstance(f, (Not, Next, Future, Always)):
        return _PREC_UNARY
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, Or):
        return _PREC_OR
    return _PREC_UNTIL


def _render(f: Formula, required: int) -> str:
    if isinstance(f, TrueF):
        s = "true"
    elif isinstance(f, FalseF):
        s = "false"
    elif isinstance(f, Atom):
        s = f.name
    elif isinstance(f, Not):
        s = "!" + _render(f.child, _PREC_UNARY)
    elif isinstance(f, Next):
        s = f"X{f.interval.text()} " + _render(f.child, _PREC_UNARY)
    elif isinstance(f, Future):
        s = f"F{f.interval.text()} " + _render(f.child, _PREC_UNARY)
    elif isinstance(f, Always):
        s = f"G{f.interval.text()} " + _render(f.child, _PREC_UNARY)
    elif isinstance(f, And):
        s = " & ".join(_render(c, _PREC_AND + 1) for c in f.children)
    elif isinstance(f, Or):
        s = " | ".join(_render(c, _PREC_OR + 1) for c in f.children)
    elif isinstance(f, Until):
        s = (
            _render(f.left, _PREC_UNTIL + 1)
            + f" U{f.interval.text()} "
            + _render(f.right, _PREC_UNTIL + 1)
        )
    else:
        raise TypeError(f"not a formula: {f!r}")
    if _prec(f) < required:
        return "(" + s + ")"
    return s


def atoms_of(f: Formula) -> frozenset:
    """All atomic proposition names occurring in the formula."""
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, (TrueF, FalseF)):
        return frozenset()
    if isinstance(f, Not):
        return atoms_of(f.child)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for c in f.children:
            out |= atoms_of(c)
        return out
    if isinstance(f, (Next, Future, Always)):
        return atoms_of(f.child)
    if isinstance(f, Until):
        return atoms_of(f.left) | atoms_of(f.right)
    raise TypeError(f"not a formula: {f!r}")


def finite_bound_sum(f: Formula) -> float:
    """Sum of all finite interval upper bounds; horizon bound for evaluation."""
    if isinstance(f, (TrueF, FalseF, Atom)):
        return 0.0
    if isinstance(f, Not):
        return finite_bound_sum(f.child)
    if isinstance(f, (And, Or)):
        return sum(finite_bound_sum(c) for c in f.children)
    if isinstance(f, (Next, Future, Always)):
        own = f.interval.hi if f.interval.bounded else f.interval.lo
        return own + finite_bound_sum(f.child)
    if isinstance(f, Until):
        own = f.interval.hi if f.interval.bounded else f.interval.lo
        return own + finite_bound_sum(f.left) + finite_bound_sum(f.right)
    raise TypeError(f"not a formula: {f!r}")
