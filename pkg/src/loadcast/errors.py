"""Exception hierarchy.

Two broad classes matter to the CLI: `InputError` subtypes mean the inputs or
configuration are bad (exit code 2), everything else derived from
`LoadcastError` is a runtime failure (exit code 1).
"""


class LoadcastError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LoadcastError):
    """Bad input data or configuration; maps to CLI exit code 2."""


# --- ingest ---------------------------------------------------------------

class TimestampError(InputError):
    """Unparseable, nonexistent, or ambiguous timestamp."""


class ParseError(InputError):
    """Malformed CSV row; message carries the 1-based line number."""


class ConflictingDuplicate(InputError):
    """Two rows share a timestamp but disagree on the value."""


class LeadingGap(InputError):
    """A series starts with a missing value, so nothing can be filled from."""


class EmptySeries(InputError):
    """No usable observations in a parsed series."""


class AxisMismatch(InputError):
    """Series that must share an hourly axis do not."""


class EmptyIntersection(InputError):
    """Load and weather ranges do not overlap."""


class ValidationFailure(InputError):
    """A constructed dataset violates its invariants (names the series)."""


# --- featureset -----------------------------------------------------------

class UnknownColumn(InputError):
    """A feature spec references a column that does not exist."""


class SpecOrderError(InputError):
    """A feature spec references another spec that is defined later."""


class LeakageError(InputError):
    """A spec would read the target at or after the prediction hour."""


# --- models ---------------------------------------------------------------

class SchemaMismatch(InputError):
    """Prediction input columns differ from the training schema."""


class TrainingDiverged(LoadcastError):
    """Nonfinite loss during training; message carries epoch and batch."""


# --- eval -----------------------------------------------------------------

class InvalidSplit(InputError):
    """Train/test ranges overlap, are empty, or are out of order."""


class EmptyWindow(InputError):
    """A named evaluation window contains no rows."""


# --- pipeline -------------------------------------------------------------

class ConfigError(InputError):
    """Config file fails validation; message carries the key path."""


class OutputDirLocked(LoadcastError):
    """Another pipeline process holds the output directory lock."""
