"""Exception hierarchy shared by all modules."""


class Gl1HomError(Exception):
    """Base class for every error raised by the package."""


class InputError(Gl1HomError):
    """Malformed user input (braid words, polynomials, corpus files)."""


class InternalFault(Gl1HomError):
    """A consistency check failed; indicates a bug or a convention mismatch."""


# arith
class NotPrime(InputError):
    pass


class Singular(InternalFault):
    pass


class NonIntegral(InternalFault):
    pass


# braid
class EmptyWord(InputError):
    pass


class InvalidCharacter(InputError):
    pass


class ZeroGenerator(InputError):
    pass


class IndexTooLarge(InputError):
    pass


# resolution / decorations
class LengthMismatch(InputError):
    pass


class ResolutionMismatch(InternalFault):
    pass


# evaluation
class NonIntegerEvaluation(InternalFault):
    pass


class NotPolynomial(InternalFault):
    pass


class NotSymmetric(InternalFault):
    pass


class WrongDegree(InternalFault):
    pass


# complex
class WrongEdge(InternalFault):
    pass


class GradingViolation(InternalFault):
    pass


class DSquareNonzero(InternalFault):
    pass


# cli
class PolyParseError(InputError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
