"""Exception types shared across the package."""


class RejectionError(ValueError):
    """Input is outside the stated domain of an operation."""


class ResourceLimitError(RuntimeError):
    """A bounded enumeration overflowed its budget.

    `count` carries the number of elements (or search nodes) reached
    before giving up, so callers can report partial progress.
    """

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count
