"""Exception and warning types shared across the package."""


class ContractError(ValueError):
    """A documented precondition of an algorithm was violated at runtime."""


class ProtocolError(RuntimeError):
    """select/feed were called out of order."""


class TraceFormatError(ValueError):
    """A trace or topology file is malformed or has the wrong shape."""


class EnumerationLimitError(RuntimeError):
    """A brute-force enumeration would exceed its combinatorial guard."""


class HorizonWarning(UserWarning):
    """The horizon is too short for a theoretical guarantee to apply."""


class RunError(RuntimeError):
    """A simulation run failed; the message carries the run index."""

    def __init__(self, run_index: int, cause: BaseException):
        super().__init__(f"run {run_index}: {type(cause).__name__}: {cause}")
        self.run_index = run_index
        self.cause = cause

    def __reduce__(self):
        return (RunError, (self.run_index, self.cause))
