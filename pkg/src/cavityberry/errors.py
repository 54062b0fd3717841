"""Exception hierarchy.

``NumericalGuardError`` subclasses are the guard trips the CLI maps to exit
code 3; plain ``ValueError`` subclasses are input validation (exit code 2).
"""


class CavityBerryError(Exception):
    """Base class for all package errors."""


class NumericalGuardError(CavityBerryError):
    """A numerical safety check failed.

    ``phi`` carries the loop angle at which the guard tripped, if any.
    """

    def __init__(self, message, phi=None):
        super().__init__(message)
        self.phi = phi


class NonHermitianInput(CavityBerryError, ValueError):
    pass


class ConvergenceFailure(NumericalGuardError):
    pass


class BandTrackingAmbiguity(NumericalGuardError):
    pass


class DegenerateBand(NumericalGuardError):
    pass


class TruncationLeak(NumericalGuardError):
    pass


class ZeroOverlap(NumericalGuardError):
    pass


class DegenerateParameters(CavityBerryError, ValueError):
    pass


class UndefinedMixingAngle(CavityBerryError, ValueError):
    pass


class EmptyGrid(CavityBerryError, ValueError):
    pass
