"""Exception hierarchy shared by every stage of the pipeline."""


class GestureError(Exception):
    """Base class for recoverable pipeline failures."""


class PreconditionError(GestureError, ValueError):
    """Input violates a documented precondition (wrong colorspace, bad size...)."""


class DegenerateInputError(GestureError, ValueError):
    """Input is well formed but numerically degenerate (empty mask, zero mean...)."""


class NoHandFoundError(GestureError):
    pass


class OrientationError(GestureError):
    pass


class ContourError(GestureError):
    pass


class SizeError(GestureError):
    pass


class NoMotionError(GestureError):
    def __init__(self, message="no motion region survived filtering", state=None):
        if state is not None:
            message = f"state {state}: {message}"
        super().__init__(message)
        self.state = state


class SequenceTooShortError(GestureError):
    pass


class InsufficientCandidatesError(GestureError):
    pass


class ProtocolError(GestureError):
    """Malformed control-link message; ``reason`` is sent back to the peer."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class TransportError(GestureError):
    pass


class ParseError(GestureError):
    """Corrupt or unsupported file contents."""


class StageError(GestureError):
    """Wraps a failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
