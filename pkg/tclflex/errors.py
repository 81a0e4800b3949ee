# errors.py


class FlexibilityError(Exception):
    """Base class for every error raised by tclflex logic."""


class InvalidParametersError(FlexibilityError, ValueError):
    """A domain value violates its construction invariants."""


class InfeasibleDurationError(FlexibilityError):
    """The requested duration is beyond what the scheme can sustain."""


class InfeasibleAmplitudeError(FlexibilityError):
    """The requested amplitude exceeds the scheme maximum at that duration."""


class ScenarioError(FlexibilityError):
    """A scenario file is unreadable or fails validation."""


class TraceMismatchError(FlexibilityError):
    """Two power traces cannot be combined."""


class MessageError(FlexibilityError):
    """A serialized broadcast message disagrees with the recomputed schedule."""


class VerificationMismatchError(FlexibilityError):
    """A simulated run disagrees with its analytic prediction."""
