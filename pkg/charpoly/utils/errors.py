class CharpolyError(Exception):
    pass


class OnRealAxis(CharpolyError):
    pass


class IndexOutOfTable(CharpolyError):
    pass


class NonConvergedQuadrature(CharpolyError):
    pass


class LostPositivity(CharpolyError):
    pass


class CoincidentArguments(CharpolyError):
    pass


class ConfluentOrderTooHigh(CharpolyError):
    pass


class DomainViolation(CharpolyError):
    pass


class OutsideSupport(CharpolyError):
    pass


class UnsupportedPotential(CharpolyError):
    pass


class PermutationBudgetExceeded(CharpolyError):
    pass


class InvalidCorrelatorSpec(CharpolyError):
    pass


class VarianceGuardViolated(CharpolyError):
    pass


class DegenerateConfig(CharpolyError):
    pass


class CoincidentRoots(CharpolyError):
    pass


class SizeBudgetExceeded(CharpolyError):
    pass


class ConvergenceDomainViolated(CharpolyError):
    pass


class ToleranceBreached(CharpolyError):
    pass
