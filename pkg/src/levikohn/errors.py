"""Exception hierarchy.

InputError subclasses map to CLI exit code 1, BudgetError to exit code 2.
"""


class LeviKohnError(Exception):
    pass


class InputError(LeviKohnError):
    pass


class DimensionMismatch(InputError, ValueError):
    pass


class NotRealError(InputError, ValueError):
    pass


class OffBoundaryError(InputError, ValueError):
    pass


class DegenerateFrameError(InputError, ValueError):
    pass


class OffVarietyError(InputError, ValueError):
    pass


class NotInBoundaryError(InputError, ValueError):
    """A submanifold that was assumed to lie in the boundary does not."""


class NotTangentError(InputError, ValueError):
    pass


class DegenerateRankError(InputError, ValueError):
    pass


class RankJumpError(InputError, ValueError):
    pass


class NoSamplesError(InputError, ValueError):
    pass


class KindMismatch(InputError, ValueError):
    pass


class ParseError(InputError, ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class BudgetError(LeviKohnError):
    pass


class GroebnerBudgetError(BudgetError):
    def __init__(self, message: str, partial_state=None):
        super().__init__(message)
        self.partial_state = partial_state
