"""Exception hierarchy.

Data problems (bad files, malformed matrices) derive from ``DataError``;
numerical dead-ends inside a solver derive from ``SolverError``. The CLI
maps the two families onto distinct exit codes.
"""


class LFMVCError(Exception):
    pass


class ConfigError(LFMVCError, ValueError):
    pass


class DataError(LFMVCError, ValueError):
    pass


class SolverError(LFMVCError, ArithmeticError):
    pass


# kernel-core
class InvalidInput(DataError):
    pass


class InvalidSpec(ConfigError):
    pass


class InvalidShape(DataError):
    pass


class AsymmetricInput(DataError):
    pass


class DegenerateDiagonal(DataError):
    pass


# io
class InconsistentViews(DataError):
    pass


class TruncatedFile(DataError):
    pass


class ParseError(DataError):
    pass


# partitions / solvers
class InvalidK(ConfigError):
    pass


class InvalidTau(ConfigError):
    pass


class InvalidDelta(ConfigError):
    pass


class NumericalFailure(SolverError):
    pass


class DegenerateResidual(SolverError):
    pass


class RankDeficientU(SolverError):
    pass


class DegenerateDelta(SolverError):
    pass


class NonMonotoneObjective(SolverError):
    """Raised when an alternating solver's objective drops; always a bug."""


class MissingTrace(LFMVCError, ValueError):
    pass
