"""Exception and warning types shared across the package."""


class FusionSDError(Exception):
    """Base class for all fusionsd errors."""


class DimensionMismatch(FusionSDError, ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class BadParameter(FusionSDError, ValueError):
    """A parameter is outside its admissible range."""


class RankDeficient(FusionSDError, ValueError):
    """A matrix expected to have full column rank does not, up to tolerance."""


class NoConvergence(FusionSDError, RuntimeError):
    """An iterative factorization failed to converge within its cap."""


class NotAFrame(FusionSDError, ValueError):
    """The collection of subspaces has no positive lower frame bound."""


class WeightedFrame(FusionSDError, ValueError):
    """The quantization pipeline requires unit weights."""


class Infeasible(FusionSDError, ValueError):
    """Requested feedback gain lies outside the admissible stability interval."""


class BadData(FusionSDError, ValueError):
    """Input data violates a precondition (e.g. nonpositive errors in a log fit)."""


class IllConditionedWarning(UserWarning):
    """A solve is proceeding on a matrix with a very large condition estimate."""


class StabilityViolationWarning(UserWarning):
    """A state norm exceeded its theoretical bound; indicates an implementation bug."""
