"""Typed errors raised across the package."""


class CarlemanLabError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(CarlemanLabError, ValueError):
    """An argument violates a documented precondition."""


class SpectrumParseError(CarlemanLabError, ValueError):
    """A spectrum file violates the two-column text format."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SingularParameterError(CarlemanLabError):
    """tau coincides with an eigenvalue; the resolvent kernel is singular."""


class QuadratureFailureError(CarlemanLabError):
    """A numerical quadrature returned a non-finite or untrusted value."""


class ResolutionError(CarlemanLabError):
    """The time step cannot resolve the requested decay rate."""


class AdmissibilityError(CarlemanLabError):
    """tau is not admissible for the spectrum at the requested margin."""


class ConvergenceError(CarlemanLabError):
    """A solver residual exceeded its tolerance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DegenerateInputError(CarlemanLabError):
    """An input is identically zero where a ratio is requested."""


class RegimeError(CarlemanLabError):
    """A parameter point lies outside the case split an estimate assumes."""


class ReportIOError(CarlemanLabError):
    """A report file could not be written."""

    def __init__(self, path, cause: Exception):
        super().__init__(f"cannot write report {path}: {cause}")
        self.path = str(path)


class ConfigError(CarlemanLabError, ValueError):
    """A study configuration is missing or has invalid fields."""

    def __init__(self, message: str, fields: list[str] | None = None):
        if fields:
            message = f"{message}: {', '.join(fields)}"
        super().__init__(message)
        self.fields = list(fields or [])
