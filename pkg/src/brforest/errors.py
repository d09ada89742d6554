"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`BRFError`, so
the CLI can map the whole family to the "data error" exit code.
"""


class BRFError(Exception):
    """Base class for library errors."""


class DataError(BRFError):
    """The input data violates a precondition."""


class MalformedRow(DataError):
    pass


class EmptyDataset(DataError):
    pass


class SingleClass(DataError):
    pass


class NonNumericCell(DataError):
    pass


class MissingValue(DataError):
    pass


class SubsetTooLarge(DataError):
    pass


class TooManyFolds(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyHistogram(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class GroupTooLarge(BRFError):
    pass


class EmptyCoalition(BRFError):
    pass


class Unsplittable(BRFError):
    """Node-local values of a feature are constant, so no midpoint separates them."""


class NoUsableFeature(BRFError):
    """None of the candidate features can split the node."""
