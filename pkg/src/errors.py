"""
Error types shared by every UNN module.

The CLI maps these onto exit codes (see ``src/cli.py``).
"""


class UnnError(Exception):
    """Root of all UNN errors."""


class InvalidArgumentError(UnnError, ValueError):
    """An argument violates an operation's precondition."""


class NoNeighborsError(UnnError, ValueError):
    """A reconstruction was requested with fewer than two embedded patterns."""


class DataParseError(UnnError, ValueError):
    """A CSV file could not be read as a numeric matrix."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class GenerationError(UnnError, RuntimeError):
    """A synthetic dataset could not be generated."""


class SizeCapError(UnnError, ValueError):
    """The brute-force oracle refuses a dataset larger than its cap."""

    def __init__(self, n, max_n):
        self.n = n
        self.max_n = max_n
        super().__init__(
            f"brute force refused: N={n} exceeds the cap of {max_n} patterns")
