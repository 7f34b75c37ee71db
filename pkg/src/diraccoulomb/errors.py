"""Exception hierarchy.

Every failure mode that a caller may want to branch on has its own class;
all of them derive from :class:`DiracCoulombError` so the CLI can map the
whole family onto exit code 1.
"""


class DiracCoulombError(Exception):
    """Base class for all numerical / validity failures of this package."""


class ImaginaryGamma(DiracCoulombError):
    """K^2 - a1^2 + a2^2 <= 0: no regular, normalizable bound state exists."""


class NoRealRoot(DiracCoulombError):
    pass


class CaseMismatch(DiracCoulombError):
    pass


class DegenerateDenominator(DiracCoulombError):
    """K^2 - a1^2 is (numerically) zero and the hyperbolic parameters blow up."""


class InvalidCosh(DiracCoulombError):
    pass


class SingularElimination(DiracCoulombError):
    """The r-independent xi factor vanishes, so one component cannot be eliminated."""


class SingularXi(DiracCoulombError):
    pass


class NoStateInWindow(DiracCoulombError):
    pass


class NonConvergent(DiracCoulombError):
    pass


class NoBoundLevel(DiracCoulombError):
    pass


class NoRoot(DiracCoulombError):
    pass
