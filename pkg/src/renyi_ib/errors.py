"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented contract (shape, sign, normalization, range)."""


class InfeasibleError(RuntimeError):
    """Requested computation exceeds a hard feasibility cap."""
