"""Exception types shared across the package."""


class CtregError(ValueError):
    """Base class for numerical/domain failures."""


class ZeroDesignError(CtregError):
    """Raised when the design matrix is identically zero (rank would be 0)."""


class NotPositiveSemidefiniteError(CtregError):
    """Raised when a kernel matrix has a materially negative eigenvalue."""
