from frictionfolio.exceptions.common.exceptions import FrictionfolioError, InvalidArgumentError, \
    InvalidUserDataError, FrictionfolioUserError


class UnsupportedPrimitiveError(InvalidArgumentError):
    def __init__(self, primitive):
        super(UnsupportedPrimitiveError, self).__init__(primitive)
        self.primitive = primitive

    def __str__(self):
        return "{}: Primitive \"{}\" is not supported by the differentiation engine".format(
            self.__class__.__name__, self.primitive)


class NonFiniteValueError(FrictionfolioError):
    pass


class CorrelationMatrixError(FrictionfolioError):
    pass


class ChainTooSmallError(InvalidUserDataError):
    def __init__(self, count, required, chain_name=None):
        super(ChainTooSmallError, self).__init__(
            "Option chain{} retains {} valid quotes after filtering, at least {} are required".format(
                "" if chain_name is None else " " + chain_name, count, required))
        self.count = count
        self.required = required


class NoChainsError(FrictionfolioUserError):
    pass


class SplineFitError(FrictionfolioError):
    pass


class DensityEstimationError(FrictionfolioError):
    pass


class TangencyNotFoundError(FrictionfolioError):
    pass


class BerkowitzInputError(InvalidArgumentError):
    pass


class TerminalUtilityError(InvalidArgumentError):
    pass


class GridSchemeError(FrictionfolioError):
    pass


class SolverDivergenceError(FrictionfolioError):
    def __init__(self, message, report=None):
        super(SolverDivergenceError, self).__init__(message)
        self.message = message
        self.report = report

    def __str__(self):
        return "{}: {}".format(self.__class__.__name__, self.message)
