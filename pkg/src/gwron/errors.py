"""Exception types shared across the package."""


class GwronError(Exception):
    """Base class for all package errors."""


class ZeroWronskian(GwronError):
    """The functions are linearly dependent (identically zero Wronskian)."""


class IrregularSingularity(GwronError):
    """The operator fails the regular-singularity test at the requested point."""


class InexactDivision(GwronError):
    """A polynomial quotient left a remainder above tolerance."""


class BadExponents(GwronError):
    """Exponent sequence is not strictly increasing / yields invalid data."""


class Collision(GwronError):
    """Coordinates collide with each other or with a marked point."""


class NoConvergence(GwronError):
    """Newton iteration failed to reach the residual target."""


class NotRealData(GwronError):
    """An operation requiring real input data received non-real values."""


class DimensionCap(GwronError):
    """Representation dimension exceeds the desk-scale cap."""


class NotInvariant(GwronError):
    """Subspace fails the invariance test for the operator being compressed."""


class PoleAtX(GwronError):
    """Evaluation point coincides with a pole of the operator coefficients."""


class ZeroVector(GwronError):
    """A nonzero vector was required."""


class NotDiagonalizable(GwronError):
    """Simultaneous diagonalization failed after the retry budget."""
