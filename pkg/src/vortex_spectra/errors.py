"""Exception types shared across the package.

Two broad families matter for callers:

* :class:`ConfigError` -- the run was mis-specified (bad key, inconsistent
  parameters, violated precondition).  The command line maps these to exit
  code 2.
* :class:`NumericalError` and its subclasses -- the computation itself
  failed or refused to certify a result.  Exit code 3.
"""

__all__ = [
    "VortexSpectraError",
    "ConfigError",
    "NumericalError",
    "EmptyWindow",
    "OutsideExistenceWindow",
    "NoConvergence",
    "TrivialSolution",
    "GridMismatch",
    "EigensolverFailure",
    "UndefinedSignature",
    "SignatureMismatch",
    "NoTransition",
    "MultipleTransitions",
    "Inconclusive",
    "GridTooCoarse",
    "NonConvergent",
    "BoxWrap",
    "Unstable",
    "CouplingConstraint",
]


class VortexSpectraError(Exception):
    """Base class for everything raised deliberately by this package."""


class ConfigError(VortexSpectraError):
    """A configuration file / parameter set is invalid or inconsistent."""


class NumericalError(VortexSpectraError):
    """Base class for failures of the numerics themselves."""


# --- existence window / profile solves -----------------------------------

class EmptyWindow(NumericalError):
    """The standing-wave existence window is empty for this nonlinearity."""


class OutsideExistenceWindow(NumericalError):
    """Requested frequency lies outside the existence window."""


class NoConvergence(NumericalError):
    """An iterative solve failed to reach its tolerance."""


class TrivialSolution(NumericalError):
    """The solver collapsed onto the zero solution."""


class GridMismatch(NumericalError):
    """Arrays passed together do not live on compatible radial grids."""


# --- spectra --------------------------------------------------------------

class EigensolverFailure(NumericalError):
    """The dense eigensolver did not converge."""


class UndefinedSignature(NumericalError):
    """The quadratic form vanishes on an eigenvector; no signature assignable."""


class SignatureMismatch(NumericalError):
    """An operation required a mode of the opposite signature."""


class NoTransition(NumericalError):
    """A bracket contained no stability transition."""


class MultipleTransitions(NumericalError):
    """A bracket contained more than one stability transition."""


class Inconclusive(NumericalError):
    """Near-zero eigenvalues could not be attributed to known symmetries."""


# --- Fermi-golden-rule computations ---------------------------------------

class GridTooCoarse(NumericalError):
    """Interpolation error estimate on the resonant circle exceeds tolerance."""


class NonConvergent(NumericalError):
    """A limiting procedure failed its extrapolation-consistency check."""


class BoxWrap(NumericalError):
    """Radiated waves reached the periodic box boundary during a run."""


class Unstable(NumericalError):
    """A time integration produced non-finite or runaway values."""


class CouplingConstraint(NumericalError):
    """A coupling's resonance combination violates the required inequality."""
