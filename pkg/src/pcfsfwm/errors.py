"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the range where a model is defined."""


class ModeCutoffError(DomainError):
    """No guided fundamental mode was found in the search bracket."""

    def __init__(self, omega, bracket):
        self.omega = omega
        self.bracket = bracket
        super().__init__(
            f"mode cutoff: no HE11 root at omega={omega!r} rad/s in u-bracket {bracket!r}"
        )


class NumericError(ArithmeticError):
    """A numerical procedure failed to converge or overflowed."""


class NotFoundError(LookupError):
    """A design search found no solution in the requested window."""
