"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it:
2 for configuration problems, 3 for numeric failures, 4 for the depth limit.
"""

CONFIG_EXIT = 2
NUMERIC_EXIT = 3
DEPTH_EXIT = 4


class FractalCurvError(Exception):
    """Base class for all fractalcurv errors."""
    exit_code = NUMERIC_EXIT


class ModelConfigError(FractalCurvError):
    """Malformed model document or a model violating its invariants."""
    exit_code = CONFIG_EXIT


class UnsupportedOrderError(FractalCurvError):
    exit_code = CONFIG_EXIT


class NotGasketFamilyError(FractalCurvError):
    exit_code = CONFIG_EXIT


class DomainError(FractalCurvError):
    """Argument outside the domain of an operation (e.g. r <= 0)."""


class InvalidCodeError(FractalCurvError):
    """Code word entry out of range for its level."""


class ResolutionError(FractalCurvError):
    """Radius too small for the grid; the caller must refine."""


class EmptySetError(FractalCurvError):
    pass


class BoundsError(FractalCurvError):
    pass


class DivergenceError(FractalCurvError):
    pass


class NonSummableError(FractalCurvError):
    pass


class InsufficientDataError(FractalCurvError):
    pass


class DepthLimitError(FractalCurvError):
    exit_code = DEPTH_EXIT

    def __init__(self, required_depth: int, max_depth: int):
        super().__init__(
            f"required depth {required_depth} exceeds the configured maximum {max_depth}"
        )
        self.required_depth = required_depth
        self.max_depth = max_depth


class EmptyLevelSetWarning(UserWarning):
    """The requested level set of a distance field is empty."""
