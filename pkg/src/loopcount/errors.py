"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class LoopCountError(Exception):
    code = "error"

    def __init__(self, message=None):
        super().__init__(message or self.code)


class NotNormal(LoopCountError, ValueError):
    code = "not-normal"


class OrderMismatch(LoopCountError, ValueError):
    code = "order-mismatch"


class NotNormalized(LoopCountError, ValueError):
    code = "not-normalized"


class NotAnExtension(LoopCountError, ValueError):
    code = "not-an-extension"


class NotExtensionAfterIsotopy(LoopCountError, RuntimeError):
    code = "not-extension-after-isotopy"


class NotAffine(LoopCountError, RuntimeError):
    code = "not-affine"


class NotOddPrime(LoopCountError, ValueError):
    code = "not-odd-prime"


class OrderCheckFailed(LoopCountError, ValueError):
    code = "order-check-failed"


class NotInvariant(LoopCountError, ValueError):
    code = "not-invariant"


class NonIntegral(LoopCountError, ArithmeticError):
    code = "nonintegral"


class Undecided(LoopCountError):
    code = "undecided"


class ResourceCap(LoopCountError):
    """Base for errors raised when a computation would exceed a configured cap."""

    code = "resource-cap"


class SpaceTooLarge(ResourceCap):
    code = "space-too-large"


class GroupTooLarge(ResourceCap):
    code = "group-too-large"


class QTooLarge(ResourceCap):
    code = "q-too-large"
