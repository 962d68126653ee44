"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalRegimeError
(and subclasses) -> 3, OSError -> 4.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class DimensionError(ValueError):
    """A requested Hilbert-space dimension is invalid or too large."""


class NumericalRegimeError(RuntimeError):
    """A computation left the regime in which its result is trustworthy."""


class LinearResponseRegimeError(NumericalRegimeError):
    """Second-order response produced an unphysical state.

    Carries the positivity deficit (most negative eigenvalue) so callers can
    report how far outside the perturbative regime the request was.
    """

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class DensityValidationError(ValueError):
    """A matrix failed one of the density-matrix invariants.

    Attributes record which check failed and by how much; exactly one of them
    is non-None.
    """

    def __init__(self, message, hermiticity_error=None, trace_error=None,
                 min_eigenvalue=None):
        super().__init__(message)
        self.hermiticity_error = hermiticity_error
        self.trace_error = trace_error
        self.min_eigenvalue = min_eigenvalue
