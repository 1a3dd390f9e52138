"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CventError(Exception):
    exit_code = 1


class InvalidParameterError(CventError, ValueError):
    """A parameter is outside its domain (non-finite, non-positive, ...)."""

    exit_code = 2


class InvalidInputError(InvalidParameterError):
    """Malformed input matrix, e.g. asymmetric beyond tolerance."""


class ScenarioError(InvalidParameterError):
    """Scenario file failed to parse or validate."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class StabilityError(CventError):
    """The Hamiltonian is not bounded from below and no override was given."""

    exit_code = 3


class NumericError(CventError, ArithmeticError):
    exit_code = 4


class NoSteadyStateError(NumericError):
    """Drift matrix is not Hurwitz, so the Lyapunov equation has no unique solution."""


class SingularParameterError(NumericError):
    pass


class NonDifferentiableError(NumericError):
    """E_N is evaluated at (or steps across) the separable kink."""


class OutputError(CventError, OSError):
    exit_code = 5
