"""Exception types shared across the package.

Every failure mode callers are expected to branch on gets its own class;
everything inherits from OsidhError so CLI dispatch can map errors to exit
codes in one place.
"""


class OsidhError(Exception):
    pass


# field and polynomial layer
class NotPrime(OsidhError):
    pass


class TooSmall(OsidhError):
    pass


class TooLarge(OsidhError):
    pass


class DivisionByZero(OsidhError):
    pass


# modular polynomial database
class ParseError(OsidhError):
    def __init__(self, message, line=None, col=None):
        super().__init__(message)
        self.line = line
        self.col = col


class MissingLevel(OsidhError):
    pass


class ValidationFailed(OsidhError):
    pass


# quadratic order layer
class DepthMismatch(OsidhError):
    pass


class NotFound(OsidhError):
    pass


class NotSplit(OsidhError):
    pass


# curve layer
class BadOrientation(OsidhError):
    pass


class BadKernel(OsidhError):
    pass


class EigenvalueAmbiguous(OsidhError):
    pass


class DegreesNotCoprime(OsidhError):
    pass


class NoMatchingKernel(OsidhError):
    pass


# chain layer
class NoRoots(OsidhError):
    pass


class ParentNotAdjacent(OsidhError):
    pass


class PrefixCollision(OsidhError):
    pass


class Ambiguous(OsidhError):
    pass


class Inconsistent(OsidhError):
    pass


class PrefixMissing(OsidhError):
    pass


# protocol layer
class ChainExhausted(OsidhError):
    pass


class Malformed(OsidhError):
    def __init__(self, message, pointer=None):
        super().__init__(message)
        self.pointer = pointer


class InvariantViol(OsidhError):
    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant


# attack layer
class NoCandidateSurvives(OsidhError):
    pass


class SmoothSearchExhausted(OsidhError):
    pass


# graph experiments
class TooDeep(OsidhError):
    pass
