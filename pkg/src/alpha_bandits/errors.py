"""Exception types shared across the toolkit."""


class AlphaBanditsError(Exception):
    """Base class for all toolkit errors."""


class InvalidAlpha(AlphaBanditsError):
    """Tempering/divergence order outside its admissible range."""


class MixedFamilies(AlphaBanditsError):
    """Divergence requested between models of different families."""


class DivergenceInfinite(AlphaBanditsError):
    """The requested divergence diverges (support/overlap violation)."""


class QuadratureDidNotConverge(AlphaBanditsError):
    """Numeric integration failed to reach the requested tolerance."""


class RewardOutOfSupport(AlphaBanditsError):
    """Observed reward lies outside the likelihood's support."""


class ArmOutOfRange(AlphaBanditsError):
    """Arm index outside [0, K)."""


class NotWarmStarted(AlphaBanditsError):
    """Index policy queried before every arm has at least one sample."""


class MixedHorizons(AlphaBanditsError):
    """Aggregation over traces with differing horizons."""


class BallUnresolvable(AlphaBanditsError):
    """Bisection could not bracket the divergence-ball boundary."""


class UnsupportedFamily(AlphaBanditsError):
    """Operation not implemented for this reward family."""


class ConfigParseError(AlphaBanditsError):
    """Config file missing, malformed, or schema-invalid."""
