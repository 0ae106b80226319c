"""Exception and warning types shared across the package."""


class CRNError(Exception):
    """Base class for every error raised by crnpersist."""


class NetworkError(CRNError, ValueError):
    pass


class SelfLoopError(NetworkError):
    pass


class DuplicateReactionError(NetworkError):
    pass


class NegativeCoefficientError(NetworkError):
    pass


class UnknownSpeciesError(NetworkError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DimensionMismatchError(CRNError, ValueError):
    pass


class EmptySetError(CRNError, ValueError):
    pass


class ExplosionCapError(CRNError, RuntimeError):
    """Siphon enumeration visited more branch nodes than its budget allows."""

    def __init__(self, limit):
        super().__init__(f"siphon enumeration exceeded node budget of {limit}")
        self.limit = limit


class NotASiphonError(CRNError, ValueError):
    pass


class InvalidIntermediatesError(CRNError, ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


class InvalidCatalystsError(CRNError, ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


class NotAConservationLawError(CRNError, ValueError):
    pass


class NotATSemiflowError(CRNError, ValueError):
    pass


class CatalystSubnetworkNotConservativeError(CRNError, ValueError):
    """The catalyst-only subnetwork has no positive conservation law, so
    consistency of the reduced network does not transfer back."""


class ZeroComplexObstruction(UserWarning):
    """A lifted conservation law may fail to be strictly positive because a
    connected component is represented by the zero complex."""


class NotAPartitionError(CRNError, ValueError):
    pass


class LayerOverlapError(CRNError, ValueError):
    pass


class StepUnderflowError(CRNError, ArithmeticError):
    pass


class NonFiniteStateError(CRNError, ArithmeticError):
    pass


class ParseError(CRNError, ValueError):
    def __init__(self, line, col, expected, text=None):
        self.line = line
        self.col = col
        self.expected = expected
        msg = f"line {line}, column {col}: expected {expected}"
        if text is not None:
            msg += f" in {text!r}"
        super().__init__(msg)


class UnknownSpeciesInAnnotationError(ParseError):
    pass


class NegativeOrZeroCoefficientError(ParseError):
    pass
