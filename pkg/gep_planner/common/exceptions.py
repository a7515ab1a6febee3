"""Exception hierarchy for the expansion planner.

Every error raised on purpose by the library derives from `GepError`. The class
level `exit_code` is what the command line returns when the error reaches it.
"""

from difflib import get_close_matches
from typing import Iterable, Sequence


class GepError(Exception):
    """Base exception for all expansion planner errors."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


# Data Related Errors
class DataNotFoundError(GepError):
    """Raised when a required input file or directory does not exist."""

    exit_code = 3


class DataValidationError(GepError):
    """Raised when input data does not satisfy the data model invariants."""

    exit_code = 4


class MissingColumnsError(DataValidationError):
    """Raised when a table lacks required columns."""

    def __init__(self, table: str, missing: Sequence[str], available: Iterable[str]):
        self.table = table
        self.missing = list(missing)
        self.available = list(available)

        message = f"{table}: missing required columns: {', '.join(self.missing)}."

        suggestions = {}
        for column in self.missing:
            close_matches = get_close_matches(column, self.available, n=1, cutoff=0.6)
            if close_matches:
                suggestions[column] = close_matches

        if suggestions:
            message += "\nDid you mean? "
            message += ", ".join(
                f"{column} → {', '.join(matches)}"
                for column, matches in suggestions.items()
            )

        super().__init__(message)


class CorrelationError(DataValidationError):
    """Raised when a correlation cannot be estimated or a target matrix is invalid."""


# Size Errors
class CapExceededError(GepError):
    """Base exception for configured size caps."""

    exit_code = 5


class ScenarioCapError(CapExceededError):
    """Raised when a scenario set would exceed `max_scenarios`."""


class EnumerationCapError(CapExceededError):
    """Raised when the oracle would enumerate more than `max_plans` plans."""


class ModelSizeError(CapExceededError):
    """Raised when a dense model would exceed the configured memory budget."""


# Solver Errors
class LpNumericalError(GepError):
    """Raised when the simplex basis becomes too ill-conditioned to continue."""

    exit_code = 6


class ModelingError(GepError):
    """Raised when a model that must be feasible by construction is not."""

    exit_code = 7


class GridIncompleteError(ModelingError):
    """Raised when a (scenario, block, year) result grid has missing cells."""


class BigMBoundError(GepError):
    """Raised when a linearization bound is active at the reported optimum."""

    exit_code = 8
