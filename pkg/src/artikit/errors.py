"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ParseError -> 2 (malformed input text),
DataError -> 3 (structurally valid input with bad content), anything else
that escapes -> 4 (internal invariant violation).
"""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ToolkitError):
    """Input text could not be parsed (manifest, dictionary, config)."""


class DataError(ToolkitError):
    """Parsed data violates a contract (bad trajectory, degenerate stats...)."""
