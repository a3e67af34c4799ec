"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, DataError -> 2,
NumericalError -> 3.
"""


class UsageError(Exception):
    """Bad command-line usage or inconsistent option combinations."""


class DataError(Exception):
    """Malformed or inconsistent input data (lexicons, corpora, reports)."""


class MalformedLineError(DataError):
    """A single corpus line that cannot be parsed; bulk readers skip and count."""


class NumericalError(Exception):
    """Divergence or non-convergence of an optimization routine."""
