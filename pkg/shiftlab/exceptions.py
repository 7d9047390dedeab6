"""Exceptions used in shiftlab."""


class ShiftLabBaseException(Exception):
    """Base Class for shiftlab Exceptions."""


class InvalidArgumentError(ShiftLabBaseException):
    """Exception raised when an operation's precondition does not hold."""


class UnsupportedError(ShiftLabBaseException):
    """Exception raised for inputs outside what the finite constructions can represent exactly."""


class NumericalFailure(ShiftLabBaseException):
    """Exception raised when a numerical step fails (singular solve, violated budget, no root).

    Args:
        message (str): Exception message
        report (dict): diagnostic values describing the failure
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class InvariantViolation(ShiftLabBaseException):
    """Exception raised when a subspace expected to be invariant is not."""

    def __init__(self, message, residual=float("nan")):
        """Create an InvariantViolation.

        Args:
            message (str): Exception message
            residual (float): the measured invariance residual
        """
        super().__init__(message)
        self.residual = residual


class ConfigValidationError(ShiftLabBaseException):
    """Exception raised for malformed experiment configurations."""

    def __init__(self, message, path=""):
        """Create a ConfigValidationError.

        Args:
            message (str): Exception message
            path (str): dotted path of the offending key
        """
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
