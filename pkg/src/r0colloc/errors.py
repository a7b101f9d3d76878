"""Exception hierarchy."""


class R0Error(Exception):
    """Base class for errors raised by this package."""


class ModelError(R0Error, ValueError):
    """Invalid model data (non-finite coefficients, unknown model, bad domain)."""


class NumericalError(R0Error, ArithmeticError):
    """The discrete eigenproblem could not be solved reliably."""


class SingularPencilError(NumericalError):
    """The transition matrix is singular to working precision."""


class ConvergenceError(NumericalError):
    """Power iteration did not converge within the iteration budget."""


class ComplexDominantError(NumericalError):
    """The dominant eigenvalue has a non-negligible imaginary part."""
