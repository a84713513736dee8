"""Exception types shared across the package."""


class CoopManipError(Exception):
    """Base class for all package-specific errors."""


class SingularOrientation(CoopManipError):
    """Pitch angle too close to +-pi/2; the Euler-rate Jacobian is not invertible."""


class NonFiniteState(CoopManipError):
    """Integration produced NaN/Inf entries."""


class InvalidConfig(CoopManipError):
    """A configuration value violates its documented constraints."""


class NotAdjacent(CoopManipError):
    """Requested a transition between regions that do not share a face."""


class EnvelopeViolated(CoopManipError):
    """A normalized tracking error left (-1, 1) at runtime.

    Carries the simulation time and the offending channel so that a failed
    run can be located in the trace.
    """

    def __init__(self, t: float, channel: str, value: float):
        self.t = t
        self.channel = channel
        self.value = value
        super().__init__(f"envelope violated at t={t:.6f}s on {channel}: xi={value:.6g}")


class EnvelopeViolatedAtStart(CoopManipError):
    """Initial error already outside the freshly selected performance envelope."""


class RegionAssertionFailed(CoopManipError):
    """The coupled system was not inside the region required by the plan."""

    def __init__(self, t: float, region: int, detail: str):
        self.t = t
        self.region = region
        super().__init__(f"region assertion failed at t={t:.6f}s for region {region}: {detail}")


class FormulaSyntaxError(CoopManipError):
    """Formula text could not be parsed.

    ``offset`` is the byte offset of the failure, ``expected`` the set of
    token descriptions that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.offset = offset
        self.expected = tuple(expected)
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{hint}")


class UnsupportedFragment(CoopManipError):
    """Formula lies outside the fragment the planner can search."""


class UnboundedUndecidable(CoopManipError):
    """Evaluation would need to look past the computable horizon (defensive)."""
