"""Exception types shared across the package."""


class SmokewatchError(Exception):
    """Base class for all smokewatch errors."""


class EmptyRecording(SmokewatchError):
    """A recording source contained fewer than 2 data rows."""


class MalformedRow(SmokewatchError):
    """A CSV row had the wrong column count or a non-numeric field."""


class NonMonotonicTime(SmokewatchError):
    """Timestamps are not strictly increasing."""


class TooFewSamples(SmokewatchError):
    """A recording is too short for the requested operation."""


class LengthMismatch(SmokewatchError):
    """Two sequences that must agree in length do not."""


class InvalidSize(SmokewatchError):
    """A size or count parameter is out of its valid range."""


class InvalidThreshold(SmokewatchError):
    """A decision threshold outside the open interval (0, 1)."""


class EmptyBatch(SmokewatchError):
    """An operation that needs at least one sample received none."""


class EmptyDataset(SmokewatchError):
    """A dataset-level operation received an empty dataset."""


class EmptyInput(SmokewatchError):
    """A metric was requested over zero predictions."""


class EmptyTrace(SmokewatchError):
    """A detection trace with no entries cannot be scored."""


class ContainsPositiveClass(SmokewatchError):
    """False-positive attribution received a smoking-labeled output."""


class NumericalFailure(SmokewatchError):
    """Non-finite values encountered during optimization."""


class SessionTooShort(SmokewatchError):
    """A session has no room for even one full window."""


class ModeMismatch(SmokewatchError):
    """Network channel mode is inconsistent with the requested operation."""
