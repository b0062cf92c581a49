class RepscanError(Exception):
    """Base class for every computation error raised by repscan."""

    exit_code = 1

    def __init__(self, message=''):
        super().__init__(message)
        self.message = message

    @property
    def name(self):
        return type(self).__name__


class ConfigError(RepscanError):
    exit_code = 2


class InvalidParameter(RepscanError):
    pass


# grid
class InvalidGrid(RepscanError):
    pass


class GridFileError(RepscanError):
    pass


class AllZeroDensity(RepscanError):
    pass


class GridTooCoarse(RepscanError):
    pass


class KernelWiderThanGrid(RepscanError):
    pass


class NotNormalized(RepscanError):
    pass


# states
class SupportExceedsGrid(RepscanError):
    pass


class EmptyBox(RepscanError):
    pass


# entropy
class NonIntegrablePower(RepscanError):
    pass


class QExpDomain(RepscanError):
    pass


# estimation
class DerivativeUnstable(RepscanError):
    pass


# infodist
class DegenerateSupport(RepscanError):
    pass


# cumulants / reconstruct
class InsufficientLadder(RepscanError):
    pass


class ReferenceMismatch(RepscanError):
    pass


# system
class InsufficientMemory(RepscanError):
    pass
