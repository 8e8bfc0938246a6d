"""Exception hierarchy and the process exit codes the CLI maps it onto."""

EXIT_OK = 0
EXIT_DATA_ERROR = 2
EXIT_ANALYSIS_ERROR = 3
EXIT_INTERNAL_ERROR = 4


class LcvError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_INTERNAL_ERROR

    def qualified_name(self):
        mod = type(self).__module__.rsplit(".", 1)[-1]
        return f"{mod}.{type(self).__name__}"


class DataError(LcvError):
    """Malformed, missing, or mutually inconsistent input data."""

    exit_code = EXIT_DATA_ERROR


class AnalysisError(LcvError):
    """The data are readable but statistically unusable for the requested analysis."""

    exit_code = EXIT_ANALYSIS_ERROR


# data-io
class MissingColumn(DataError):
    pass


class EmptyTable(DataError):
    pass


class DuplicateSnpId(DataError):
    pass


class EmptyIntersection(DataError):
    pass


class MissingGeneticMap(DataError):
    pass


# regression / inference
class DegenerateBlocks(DataError):
    pass


class ZeroHeritability(AnalysisError):
    pass


class ZeroRho(AnalysisError):
    pass


class UndefinedGcp(AnalysisError):
    pass


# MR baselines
class NoInstruments(AnalysisError):
    pass


class TooFewInstruments(AnalysisError):
    pass


# simulator
class InfeasibleScenario(DataError):
    pass


class OverlapInfeasible(DataError):
    pass


class SingularDiagonal(DataError):
    pass
