"""Exception types raised by the solvers."""


class CIPError(Exception):
    """Base class for all solver errors."""


class InputError(CIPError, ValueError):
    """Invalid user input: bad grid, non-finite data, malformed model."""


class OutOfCellError(InputError):
    """Evaluation point lies outside a cubic profile's cell."""


class AmbiguousSideError(InputError):
    """One-sided derivative requested exactly at an interface without a side."""


class NumericalError(CIPError, RuntimeError):
    """A numerical procedure failed (integrator underflow, singular system)."""


class CFLError(NumericalError):
    """Time step exceeds the CFL limit of a scheme that requires CFL <= 1."""


class CoefficientError(NumericalError):
    """Wave speed is not strictly positive where the scheme divides by it."""
