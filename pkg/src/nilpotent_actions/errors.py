from __future__ import annotations


class NilpotentActionsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class VerificationFailed(NilpotentActionsError, RuntimeError):
    exit_code = 1


class ConfigError(NilpotentActionsError, ValueError):
    exit_code = 2


class CoprimalityError(NilpotentActionsError, ValueError):
    """An order that must be prime to the excluded characteristic is not."""

    exit_code = 3


class BoundExceeded(NilpotentActionsError, RuntimeError):
    """An exhaustive scan would exceed its configured bound."""

    exit_code = 4

    def __init__(self, what: str, size: int, bound: int):
        super().__init__(f"{what}: size {size} exceeds bound {bound}")
        self.what = what
        self.size = size
        self.bound = bound


class PreconditionError(NilpotentActionsError, ValueError):
    exit_code = 5


class InfiniteGroupError(PreconditionError):
    pass


class GroupMismatch(PreconditionError):
    pass


class SearchFailure(NilpotentActionsError, RuntimeError):
    exit_code = 6
