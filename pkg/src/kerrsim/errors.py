"""Exception types raised across the package.

Every failure mode that a caller may reasonably want to catch gets its own
class; all inherit from KerrSimError so `except KerrSimError` catches any
domain failure without masking programming errors.
"""


class KerrSimError(Exception):
    """Base class for all domain errors."""


class Diverged(KerrSimError):
    """Time stepping blew past the amplitude guard (step size too large)."""


class NoBistability(KerrSimError):
    """Parameters do not admit two stable steady-state branches."""


class NoSplittingRegime(KerrSimError):
    """Detuning and anharmonicity signs rule out normal-mode splitting."""


class DimensionTooSmall(KerrSimError):
    """Fock-space cutoff below the minimum sensible size."""


class CutoffTooSmall(KerrSimError):
    """Truncated basis leaks probability beyond the accepted tail bound."""


class TraceDrift(KerrSimError):
    """Density-matrix trace drifted during integration."""


class VacuumG2Undefined(KerrSimError):
    """g2(0) requested for a state with no photons."""


class PoleInParameter(KerrSimError):
    """Hypergeometric lower parameter hit a non-positive integer."""


class NonConvergence(KerrSimError):
    """Series failed to meet its tail bound within the term cap."""


class ImaginaryResidue(KerrSimError):
    """A nominally real quantity kept a non-negligible imaginary part."""


class PoleHit(KerrSimError):
    """Susceptibility evaluated exactly on a pole (only possible at gamma=0)."""


class SvdFailure(KerrSimError):
    """SVD did not converge on an ill-conditioned two-site tensor."""


class StationarityViolated(KerrSimError):
    """Two-time correlation requested on a visibly drifting state."""


class TooShort(KerrSimError):
    """Time series too short for the requested spectral estimate."""


class GridTooCoarse(KerrSimError):
    """Phase-space grid failed its normalization self-check."""
