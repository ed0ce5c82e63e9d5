"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input rejected by a precondition check.

    ``index`` carries the offending position when one is meaningful
    (e.g. the 1-based coupling index of a nonpositive ``J_i``).
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations
