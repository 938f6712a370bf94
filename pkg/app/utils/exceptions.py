class TopPError(Exception):
    """
    Base class for every error raised by the top-p HMM package
    """

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ParameterError(TopPError, ValueError):
    """Invalid argument: p out of range, dimension mismatch, bad spec."""


class ModelValidationError(ParameterError):
    """Probabilities or labels violate the model invariants."""


class CorpusError(ParameterError):
    """Corpus cannot produce a usable vocabulary."""


class ModelFileError(TopPError):
    """Model document missing, unreadable or malformed."""


class DegenerateEvidenceError(TopPError):
    """
    Observation has zero total likelihood under the predicted message.
    Under top-p truncation this becomes reachable, so it is reported
    instead of silently resetting the message.
    """

    def __init__(self, obs: int, time: int | None = None):
        where = f" at time {time}" if time is not None else ""
        super().__init__(
            f"Observation {obs} has zero likelihood under the predicted message{where}"
        )
        self.obs = obs
        self.time = time


class BoundViolationError(TopPError):
    """An asserted theoretical error bound was exceeded."""
