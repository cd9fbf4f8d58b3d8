"""Exception hierarchy shared across the package."""


class HazbandsError(ValueError):
    """Base class for all errors raised by hazbands."""


class EmptyData(HazbandsError):
    pass


class MalformedRow(HazbandsError):
    def __init__(self, index, reason=""):
        self.index = index
        msg = f"malformed row {index}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DegenerateSample(HazbandsError):
    pass


class OutOfDomain(HazbandsError):
    pass


class IntegrandSingular(HazbandsError):
    pass


class NoFiniteMedian(HazbandsError):
    pass


class InvalidParameter(HazbandsError):
    pass


class DomainError(HazbandsError):
    pass


class InvalidConfig(HazbandsError):
    pass


class InsufficientDraws(HazbandsError):
    pass


class NoEvents(HazbandsError):
    pass


class TooLarge(HazbandsError):
    pass


class BadShape(HazbandsError):
    pass
