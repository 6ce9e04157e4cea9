"""Exception types shared across the package."""


class SpecError(ValueError):
    """Invalid model or run parameters.

    ``field`` names the offending key when there is one.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DimensionCapError(SpecError):
    """Requested Hilbert space exceeds the configured site cap."""


class NumericalError(RuntimeError):
    """A backend linear-algebra routine failed or a numerical precondition was not met."""
