"""Exception types raised by the numerical layer.

Everything here derives from SupercoherentError so callers (and the CLI) can
separate domain/numerical failures from ordinary usage mistakes, which raise
ValueError at argument-validation time instead.
"""


class SupercoherentError(Exception):
    """Base class for domain and numerical failures."""


class RegionError(SupercoherentError):
    """A construction was requested outside the parameter region it serves."""


class NoEigenstateError(SupercoherentError):
    """The lowering conditions admit no solution for the given free parameters."""


class TruncationOverflowError(SupercoherentError):
    """The requested tail tolerance needs more Fock levels than the cap allows."""


class ZeroNormError(SupercoherentError):
    """Expectation value requested for a state with vanishing norm."""


class NumericalError(SupercoherentError):
    """An internal consistency check failed (for example a non-real moment)."""
