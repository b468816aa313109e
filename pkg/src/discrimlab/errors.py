"""
Errors Module - Exception hierarchy for discrimlab
"""


class DiscrimLabError(Exception):
    """Base class for every error raised by discrimlab"""


class UnphysicalStateError(DiscrimLabError, ValueError):
    """Bloch vector outside the ball, or a matrix that is not a density operator"""


class InvalidEnsembleError(DiscrimLabError, ValueError):
    """Priors not normalized or overlap out of range"""


class DegenerateConditioningError(DiscrimLabError, ValueError):
    """An Alice outcome has (numerically) zero probability"""


class InconsistentStatisticsError(DiscrimLabError, ValueError):
    """Pass statistics that no set of states can produce"""


class PreconditionError(DiscrimLabError, ValueError):
    """An operation was called outside its domain"""


class ConfigError(DiscrimLabError, ValueError):
    """Invalid run configuration"""


class ReportError(DiscrimLabError, OSError):
    """Writing a report failed"""
