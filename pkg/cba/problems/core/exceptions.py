class CbaError(Exception):
    """
    Base class of every error raised by the toolkit.
    """

class DimensionMismatchError(CbaError, ValueError):
    pass

class NonFiniteError(CbaError, ValueError):
    pass

class InvalidParameterError(CbaError, ValueError):
    pass

class InfeasiblePointError(CbaError, ValueError):
    pass

class ConfigError(CbaError, ValueError):
    pass

class DatasetError(CbaError, ValueError):
    """
    Raised when a libsvm text cannot be turned into a Dataset.

    :param message: Description of the problem.
    :type message: str
    :param line: 1-based line number of the offending line, 0 when the whole file is at fault.
    :type line: int
    """
    def __init__(self, message, line=0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)

class MalformedTokenError(DatasetError):
    pass

class NonIncreasingIndexError(DatasetError):
    pass

class LabelCountError(DatasetError):
    pass

class EmptyDatasetError(DatasetError):
    pass
