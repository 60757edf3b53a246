"""Exception types shared across the package."""


class IsowidthError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(IsowidthError):
    pass


class RankDeficient(IsowidthError):
    pass


class Unbounded(IsowidthError):
    pass


class Infeasible(IsowidthError):
    pass


# an empty halfspace system and an infeasible LP are the same condition
Empty = Infeasible


class OriginNotInterior(IsowidthError):
    pass


class NoConvergence(IsowidthError):
    pass


class NotIsotropic(IsowidthError):
    pass


class NotCentered(IsowidthError):
    pass


class NotEven(IsowidthError):
    pass


class DecompositionFailed(IsowidthError):
    pass


class NonFinite(IsowidthError):
    pass


class ParseError(IsowidthError):
    """Malformed input file or JSON document; message carries a field diagnostic."""


class TruncationWarning(UserWarning):
    """Integration range too short: the tail of the integrand was not negligible."""
