from typing import Optional


class CuspResError(Exception):
    """Base class for every error raised by the cuspres library."""


class PoleError(CuspResError):
    pass


class DomainError(CuspResError):
    pass


class BranchError(DomainError):
    """Continued argument left the sheet range an expansion is valid on."""


class TruncationError(CuspResError):
    pass


class NearZeroDenominatorError(CuspResError):
    pass


class ConvergenceError(CuspResError):
    def __init__(self, message: str, last: Optional[complex] = None, iterations: int = 0):
        super().__init__(message)
        self.last = last
        self.iterations = iterations


class DivergenceError(ConvergenceError):
    pass


class RootJumpError(CuspResError):
    pass


class DuplicateRootError(CuspResError):
    pass


class StepSizeError(CuspResError):
    pass


class ConfigError(CuspResError):
    pass
