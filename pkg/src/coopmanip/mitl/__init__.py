"""MITL formulas: parsing, canonical printing, and point-wise evaluation."""

from .formula import (
    FALSE,
    TRUE,
    UNBOUNDED,
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
    atoms_of,
    f_and,
    f_not,
    f_or,
    finite_bound_sum,
)
from .parser import parse
from .semantics import TimedWord, satisfies

__all__ = [
    "FALSE",
    "TRUE",
    "UNBOUNDED",
    "Always",
    "And",
    "Atom",
    "FalseF",
    "Formula",
    "Future",
    "Interval",
    "Next",
    "Not",
    "Or",
    "TimedWord",
    "TrueF",
    "Until",
    "atoms_of",
    "f_and",
    "f_not",
    "f_or",
    "finite_bound_sum",
    "parse",
    "satisfies",
]
