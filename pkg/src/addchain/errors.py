"""Exception types shared across the toolkit."""


class AddChainError(Exception):
    """Base class for all toolkit errors."""


class ChainError(AddChainError):
    """A chain listing violates a structural invariant.

    ``index`` is the first offending step index.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotStartingAtOne(ChainError):
    pass


class NotIncreasing(ChainError):
    pass


class BadOperandIndex(ChainError):
    pass


class SumMismatch(ChainError):
    pass


class NoDecomposition(ChainError):
    """A step value is not the sum of any two earlier values."""


class ValueTooLarge(ChainError):
    """A chain value exceeds the supported 63-bit range."""


class CapExceeded(AddChainError):
    """Input is beyond the enforced desk-scale cap."""


class BudgetExhausted(AddChainError):
    """Node budget hit before minimality was proven.

    ``best`` holds the best-known (inexact) search result, ``proven_lower``
    the largest depth that was fully exhausted plus one.
    """

    def __init__(self, message, best=None, proven_lower=None):
        super().__init__(message)
        self.best = best
        self.proven_lower = proven_lower


class MTooSmall(AddChainError):
    """Step-taxonomy parameter m below the supported minimum."""


class PrecisionEscalation(AddChainError):
    """A growth-ratio comparison fell inside the numeric guard band."""


class DomainError(AddChainError):
    """A real-valued parameter lies outside its mathematical domain."""


class InvariantViolation(AddChainError):
    """Family parameters or inputs violate a construction invariant."""


class OverflowRisk(AddChainError):
    """A constructed value would exceed the 63-bit range."""


class CacheError(AddChainError):
    """A cache file is malformed or disagrees with recomputed values."""
