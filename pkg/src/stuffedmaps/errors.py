"""Exception types shared across the package."""


class StuffedMapError(Exception):
    """Base class for every error raised by this package."""


class MalformedPermutation(StuffedMapError):
    pass


class NonPlanar(StuffedMapError):
    pass


class NotBipartite(StuffedMapError):
    pass


class NotHypertree(StuffedMapError):
    pass


class UndistinguishedComponent(StuffedMapError):
    pass


class InvalidCellSpec(StuffedMapError):
    pass


class SymbolUniverseMismatch(StuffedMapError):
    pass


class NonUnitConstantTerm(StuffedMapError):
    pass


class NoStabilization(StuffedMapError):
    pass


class IncompleteTable(StuffedMapError):
    pass


class UnreachableVertex(StuffedMapError):
    pass


class ConventionFailure(StuffedMapError):
    pass


class MalformedContour(StuffedMapError):
    pass


class MissingMoment(StuffedMapError):
    pass


class OddGammaPower(StuffedMapError):
    pass


class Inconsistent(StuffedMapError):
    pass


class BudgetExceeded(StuffedMapError):
    pass
