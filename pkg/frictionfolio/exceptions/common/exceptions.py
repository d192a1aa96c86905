from frictionfolio.util.common.type import EqualityMixin, StringRepresentationMixin


class FrictionfolioError(Exception):
    def __str__(self):
        return "{}: {}".format(self.__class__.__name__, self.args[0])


class FrictionfolioInternalError(FrictionfolioError):
    pass


class FrictionfolioUserError(FrictionfolioError):
    def __init__(self, message):
        super(FrictionfolioUserError, self).__init__(message)
        self.message = message

    def __str__(self):
        return "User input error: {}".format(self.message)


class FrictionfolioTraceableError(FrictionfolioError):
    def __init__(self, message, cause):
        super(FrictionfolioTraceableError, self).__init__(message)
        self.message = message
        self.cause = cause

    def __str__(self):
        return "{}\nCaused by: {}".format(self.message, self.cause)


class FrictionfolioUnexpectedError(FrictionfolioError):
    def __init__(self, traceback):
        super(FrictionfolioUnexpectedError, self).__init__(traceback)
        self.traceback = traceback

    def __str__(self):
        return "{}: Unexpected error:\n{}".format(self.__class__.__name__, self.traceback)


# For when an argument is incorrectly passed to a function, or if an argument is missing in a function call.
# This should generally be caused by some bug in the calling code.
class InvalidArgumentError(FrictionfolioInternalError):
    pass


# A state or parameter lies outside the region where a formula is defined (negative variance, omega outside [0,1]).
class DomainViolationError(InvalidArgumentError):
    pass


class FileAccessError(FrictionfolioInternalError):
    pass


# For when the data is of the expected type or form, but the content of the data itself is invalid or unexpected.
# This should generally be caused by some error or inconsistency in the user's input.
class InvalidUserDataError(FrictionfolioUserError):
    pass


class MissingUserDataError(InvalidUserDataError):
    pass


class InvalidYmlFileError(FrictionfolioError):
    pass


class ConfigError(EqualityMixin, StringRepresentationMixin, FrictionfolioError):
    def __init__(self, field, cause):
        super(ConfigError, self).__init__(field)
        self.field = field
        self.cause = cause

    def __str__(self):
        return "{}: Error while reading \"{}\":\n{}".format(self.__class__.__name__, self.field, str(self.cause))
