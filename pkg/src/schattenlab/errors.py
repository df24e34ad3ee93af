"""Exception hierarchy shared by every module."""


class SchattenLabError(Exception):
    """Base class for all errors raised by schattenlab."""


class DimensionTooLarge(SchattenLabError):
    pass


class NotHermitian(SchattenLabError):
    pass


class LocalityViolation(SchattenLabError):
    pass


class EigensolverFailure(SchattenLabError):
    pass


class SpectrumOutsideInterval(SchattenLabError):
    pass


# the DQC1 circuit builder uses the shorter name
SpectrumOutOfRange = SpectrumOutsideInterval


class WorkBudgetExceeded(SchattenLabError):
    pass


class ConditionInfinite(SchattenLabError):
    pass


class BudgetInfeasible(SchattenLabError):
    pass


class InvalidModel(SchattenLabError):
    pass


class InfeasibleParameters(SchattenLabError):
    pass


class ConfigError(SchattenLabError):
    pass


class InputError(SchattenLabError):
    """Malformed input file; carries the path and (when known) the line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
