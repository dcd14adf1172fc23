"""Exception hierarchy for pdsforge."""


class PdsForgeError(Exception):
    """Base class for every error raised by this package."""


# field
class NotOddPrime(PdsForgeError, ValueError):
    pass


class ReducibleModulus(PdsForgeError, ValueError):
    pass


class DegreeMismatch(PdsForgeError, ValueError):
    pass


class ContextMismatch(PdsForgeError, ValueError):
    pass


class FieldDivisionByZero(PdsForgeError, ZeroDivisionError):
    pass


# groups
class OrderTooSmall(PdsForgeError, ValueError):
    pass


class TTooSmall(PdsForgeError, ValueError):
    pass


class HandleMismatch(PdsForgeError, ValueError):
    pass


class TooLarge(PdsForgeError, ValueError):
    pass


# quadratic forms
class BadEps(PdsForgeError, ValueError):
    pass


class MTooSmall(PdsForgeError, ValueError):
    pass


class DimensionMismatch(PdsForgeError, ValueError):
    pass


class SingularVector(PdsForgeError, ValueError):
    pass


class ZeroVector(PdsForgeError, ValueError):
    pass


# constructions / algebra / products
class BadParameters(PdsForgeError, ValueError):
    pass


class PartitionFailure(PdsForgeError):
    pass


class TooManyClasses(PdsForgeError, ValueError):
    pass


class NotAScheme(PdsForgeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IdentityFails(PdsForgeError):
    def __init__(self, message, element=None, expected=None, actual=None):
        super().__init__(message)
        self.element = element
        self.expected = expected
        self.actual = actual


class SizeMismatch(PdsForgeError, ValueError):
    pass


class NotPaleyType(PdsForgeError, ValueError):
    pass


class NotSkewHadamard(PdsForgeError, ValueError):
    pass


class FiberNotClassUnion(PdsForgeError):
    def __init__(self, message, fiber=None, element=None):
        super().__init__(message)
        self.fiber = fiber
        self.element = element


class SignatureMismatch(PdsForgeError, ValueError):
    pass
