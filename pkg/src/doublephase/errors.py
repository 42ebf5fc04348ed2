"""Exception types shared across the package."""


class DoublePhaseError(Exception):
    """Base class for all package-specific failures."""


class ExponentRangeError(DoublePhaseError):
    """An exponent field takes a value <= 1 somewhere (not an admissible exponent)."""


class CriticalExponentError(DoublePhaseError):
    """The critical Sobolev exponent is undefined: the base exponent reaches the dimension."""


class NormBracketError(DoublePhaseError):
    """Bisection could not bracket the Luxemburg-norm root (overflow-scale input)."""


class SubdomainBoundsError(DoublePhaseError):
    """A plateau sub-box touches or leaves the domain."""


class EndpointScheduleError(DoublePhaseError):
    """The doubling schedule never drove the energy negative along the ray."""


class LambdaGridError(DoublePhaseError):
    """No value on the supplied lambda grid makes the energy of the bump negative."""


class PathCollapseError(DoublePhaseError):
    """The deformed path's maximum fell below the endpoint energies (path degenerated)."""


class RayScheduleError(DoublePhaseError):
    """Some ray stayed energy-nonnegative through the whole radius schedule."""


class SphereGeometryError(DoublePhaseError):
    """No tested sphere radius had strictly positive energy minimum."""


class FieldShapeError(DoublePhaseError):
    """A field file does not match the configured grid."""


class ConfigError(DoublePhaseError):
    """Experiment configuration could not be parsed or validated."""


class HypothesisGateError(DoublePhaseError):
    """A solver was invoked with failing theorem hypotheses and no override."""
