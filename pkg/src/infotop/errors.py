"""Exception hierarchy shared by every module of the package."""


class InfotopError(Exception):
    """Base class for all package errors."""


# algebra
class ClosureViolation(InfotopError):
    pass


class NotInUniverse(InfotopError):
    pass


class BudgetExceeded(InfotopError):
    pass


# observers
class GroundMismatch(InfotopError):
    pass


class ScaleOutOfRange(InfotopError):
    pass


class AmbiguousWitness(InfotopError):
    pass


class NotATopology(InfotopError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


# topology
class EmptyInteriorFamily(InfotopError):
    pass


class TheoremViolation(InfotopError):
    pass


class NoComplement(InfotopError):
    pass


class NonUniqueComplement(InfotopError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class IncompatibleIndexSets(InfotopError):
    pass


class InvalidTopology(InfotopError):
    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class Undecidable(InfotopError):
    pass


# covers / entropy
class NotACover(InfotopError):
    pass


class TargetMismatch(InfotopError):
    pass


class NonCommutativeMeet(InfotopError):
    pass


class HypothesisViolation(InfotopError):
    pass


class HypothesisNotMet(InfotopError):
    pass


class SizeCapExceeded(InfotopError):
    pass


class NotIntertwining(InfotopError):
    pass


class NotHomeomorphism(InfotopError):
    pass


# knowledge spread
class IndexOutOfRange(InfotopError):
    pass


class MethodSetMismatch(InfotopError):
    pass


class WindowTooSmall(InfotopError):
    pass


# cli / definition files
class DefinitionError(InfotopError):
    """Parse or resolution failure in a system-definition file."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class DefinitionSyntaxError(DefinitionError):
    pass


class UnresolvedReference(DefinitionError):
    pass


class ValueOutOfRange(DefinitionError):
    pass
