"""Exception taxonomy shared across the package."""


class PolyregError(Exception):
    """Base class for precondition violations (CLI exit code 3)."""


class DimensionError(PolyregError):
    """Shapes of the supplied operands are inconsistent."""


class RankError(PolyregError):
    """A matrix that must parameterize a norm is rank-deficient (or a hull is degenerate)."""


class NotANormError(PolyregError):
    """A probed functional vanished on a nonzero vector."""


class FrameError(PolyregError):
    """Filterbank construction violates the Parseval/zero-mean requirements."""


class PotentialError(PolyregError):
    """Invalid or unsupported separable potential specification."""


class DivergenceError(Exception):
    """An iterative solver produced non-finite iterates (CLI exit code 4)."""


class ParseError(Exception):
    """A file or flag value could not be parsed (CLI exit code 2)."""
