class NNRankError(Exception):
    """Base class for all errors raised by `nnrank`"""


class ParseError(NNRankError, ValueError):

    def __init__(self, message: str, line: int = 0, column: int = 0):
        """
        Parameters
        ----------
        message : str
            Human readable description of the problem
        line : int
            1-based line number of the offending token (0 if unknown)
        column : int
            1-based column number of the offending token (0 if unknown)
        """
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DimensionError(NNRankError, ValueError):
    pass


class FactorizationError(NNRankError, ValueError):
    pass


class SingularMatrixError(NNRankError, ZeroDivisionError):
    pass


class CapExceededError(NNRankError, ValueError):
    pass


class DegenerateConfigurationError(NNRankError):
    pass


class RecoveryError(NNRankError):

    def __init__(self, index: int, reason: str):
        super().__init__(f"Recovery failed at index {index}: {reason}")
        self.index = index
        self.reason = reason
