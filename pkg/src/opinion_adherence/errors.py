"""Exception hierarchy shared by all modules."""


class OpinionAdherenceError(Exception):
    """Base class for every error raised by this package."""


class RecordParseError(OpinionAdherenceError):
    """A single input line could not be turned into a record."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


class EmptyCorpusError(OpinionAdherenceError, ValueError):
    """A frequency was requested from a table with no documents."""


class ConfigurationError(OpinionAdherenceError, ValueError):
    """Invalid parameters or missing inputs."""


class EmptyDocumentError(OpinionAdherenceError, ValueError):
    """Adherence is undefined for a document with no terms."""


class InvalidScoreError(OpinionAdherenceError, ValueError):
    """A score falls outside the range of the binning scheme."""


class BalancingError(OpinionAdherenceError, ValueError):
    """Bins cannot be balanced, typically because one is empty."""


class InsufficientDataError(OpinionAdherenceError, ValueError):
    """Fewer records than bins, or an empty bin where one is required."""


class EmptyCategoryError(OpinionAdherenceError, ValueError):
    """No item in a category survived the filters."""
