"""Exception hierarchy. The CLI maps each family onto an exit code."""


class TwoWellError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(TwoWellError, ValueError):
    """Invalid physical or reduced parameters."""


class DomainError(TwoWellError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class SingularityError(DomainError):
    """Point too close to x = 0 or x = 1, where the phase equation diverges."""


class ConfigurationError(TwoWellError, ValueError):
    """Options that contradict each other or an operation's preconditions."""


class NotACenterError(DomainError):
    """Linearization around a point that is not a stable center."""


class CapacityError(DomainError):
    """Problem size above the configured hard cap."""


class NumericalError(TwoWellError, RuntimeError):
    """A numerical method failed to deliver the requested accuracy."""


class StiffnessError(NumericalError):
    pass


class EstimationError(NumericalError):
    pass


class RefinementError(NumericalError):
    pass


class OutputError(TwoWellError, OSError):
    """Output path could not be written."""
