# wcindex/services/errors.py

from __future__ import annotations


class WildcardIndexError(Exception):
    """Base class for every error raised by the index."""


class RejectedInputError(WildcardIndexError, ValueError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset


class IndexRangeError(WildcardIndexError, IndexError):
    pass


class ContractViolation(WildcardIndexError, ValueError):
    pass


class ParameterError(WildcardIndexError, ValueError):
    pass


class BudgetExceededError(WildcardIndexError, RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} concrete patterns, budget is {budget}")
        self.required = required
        self.budget = budget


class IndexFileError(WildcardIndexError, ValueError):
    pass
