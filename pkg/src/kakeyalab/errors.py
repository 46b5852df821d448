"""Exception hierarchy.

Every error raised by the library derives from :class:`KakeyaLabError` so the
CLI can map library failures to a single exit code.
"""


class KakeyaLabError(ValueError):
    pass


class RankDeficient(KakeyaLabError):
    pass


class DimensionMismatch(KakeyaLabError):
    pass


class BadDimensions(KakeyaLabError):
    pass


class InsufficientGrid(KakeyaLabError):
    pass


class GridBelowResolution(KakeyaLabError):
    pass


class DegenerateSphere(KakeyaLabError):
    pass


class LengthMismatch(KakeyaLabError):
    pass


class ZeroFrequency(KakeyaLabError):
    pass


class BadParameters(KakeyaLabError):
    pass
