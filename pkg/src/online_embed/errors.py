"""Exception types shared across the package."""


class EmbeddingError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveDistance(EmbeddingError, ValueError):
    def __init__(self, i, j, value):
        super().__init__(f"d({i},{j}) = {value} is not positive")
        self.pair = (i, j)
        self.value = value


class TriangleViolation(EmbeddingError, ValueError):
    def __init__(self, i, j, k):
        super().__init__(f"triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
        self.i, self.j, self.k = i, j, k


class DimensionMismatch(EmbeddingError, ValueError):
    pass


class DimensionUnknown(EmbeddingError, ValueError):
    pass


class NotATreeMetric(EmbeddingError, ValueError):
    def __init__(self, quadruple, message=None):
        super().__init__(message or f"four-point condition fails on {tuple(quadruple)}")
        self.quadruple = tuple(quadruple)


class CertificateFailure(EmbeddingError, AssertionError):
    def __init__(self, name, detail=""):
        super().__init__(f"certificate {name!r} failed{': ' + detail if detail else ''}")
        self.name = name


class NonContractionBreach(EmbeddingError):
    pass


class LipschitzBreach(EmbeddingError):
    pass


class NoIntersectingPairing(EmbeddingError):
    pass


class PlacementInfeasible(EmbeddingError):
    pass


class BranchCapExceeded(EmbeddingError):
    pass


class ConfigError(EmbeddingError, ValueError):
    pass
