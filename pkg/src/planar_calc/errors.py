"""Exception hierarchy.

Two families: :class:`InputError` (malformed or out-of-contract input, CLI exit
code 1) and :class:`NumericalError` (a solver or quadrature could not deliver
the requested accuracy, CLI exit code 2).
"""


class PlanarCalcError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 2


class InputError(PlanarCalcError, ValueError):
    exit_code = 1


class NumericalError(PlanarCalcError, ArithmeticError):
    exit_code = 2


class InvalidInputError(InputError):
    pass


class DegenerateGeometryError(InputError):
    pass


class DomainError(InputError):
    """Evaluation point outside the region where a formula applies."""


class PreconditionError(InputError):
    pass


class ReflectionError(InputError):
    """Half-circle data not real at the real-axis endpoints."""


class DecompositionError(InputError):
    """Pieces of a domain decomposition do not fit together."""


class SymbolDomainError(InputError):
    """Spectrum of the matrix is not inside the symbol's circle."""


class SeamConditionError(NumericalError):
    """Boundary data does not vanish where the two pieces' boundaries meet."""


class ResolutionError(NumericalError):
    pass


class NearSingularError(NumericalError):
    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class QuadratureError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class TruncationError(NumericalError):
    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound
