"""Exception hierarchy shared by every module of the toolkit."""


class ToolkitError(ValueError):
    """Base class for all input and domain errors raised by mlqsl."""


class NonHermitian(ToolkitError):
    pass


class NotPSD(ToolkitError):
    pass


class NotDensityMatrix(ToolkitError):
    pass


class DimMismatch(ToolkitError):
    pass


class DomainError(ToolkitError):
    pass


class DegenerateHamiltonian(ToolkitError):
    pass


class RankBoundViolation(ToolkitError):
    pass


class NonOrthogonalPairing(ToolkitError):
    pass


class LevelOrderError(ToolkitError):
    pass


class NotQubit(ToolkitError):
    pass


class OutsideBall(ToolkitError):
    pass


class PurityMismatch(ToolkitError):
    pass


class InfeasibleFidelity(ToolkitError):
    pass


class SchemaError(ToolkitError):
    """Malformed JSON input; ``location`` carries line or key context."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
