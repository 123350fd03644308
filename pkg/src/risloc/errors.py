"""Exception hierarchy for the risloc package."""


class RislocError(Exception):
    """Base class for all package-specific errors."""


class ZeroDistance(RislocError):
    """Two points that must be distinct coincide (zero path length)."""


class InvalidDimension(RislocError):
    """An array/grid dimension is out of its admissible range."""


class IndexOutOfRange(RislocError):
    """A transmission or subcarrier index is outside [1, M] / [1, N]."""


class DimensionMismatch(RislocError):
    """Inconsistent shapes between related inputs."""


class TooLarge(RislocError):
    """A brute-force code path was asked to handle an instance above its guard."""


class SingularFim(RislocError):
    """The location-domain FIM is numerically singular (unidentifiable geometry)."""


class RankDeficient(RislocError):
    """The steering basis B has a rank-deficient Gram matrix."""


class EmptyGrid(RislocError):
    """The beamforming search grid contains no feasible candidate."""


class LayoutMismatch(RislocError):
    """Per-satellite FIM blocks disagree on the location-parameter layout."""


class ConfigError(RislocError):
    """Base class for experiment-configuration problems."""


class ParseError(ConfigError):
    """The configuration file could not be parsed."""


class ValidationError(ConfigError):
    """The configuration parsed but violates an invariant."""
