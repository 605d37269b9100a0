"""Exception hierarchy.

``InvalidInput`` subclasses mean the caller handed over something outside an
operation's domain (CLI exit code 1).  ``AlgorithmFailure`` subclasses mean an
internal consistency check tripped (CLI exit code 2).
"""


class FormsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(FormsError, ValueError):
    pass


class DimensionMismatch(InvalidInput):
    pass


class SingularMatrix(InvalidInput):
    pass


class NotClosed(InvalidInput):
    pass


class NotHomogeneous(InvalidInput):
    pass


class ZeroForm(InvalidInput):
    pass


class NotDecomposable(InvalidInput):
    pass


class EulerConditionFails(InvalidInput):
    pass


class VanishesInCodimOne(InvalidInput):
    pass


class DegreeNotOne(InvalidInput):
    pass


class ClassZero(InvalidInput):
    """A class-zero distribution is integrable; Jouanolou's classification applies instead."""


class ParseError(InvalidInput):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class AlgorithmFailure(FormsError, RuntimeError):
    pass


class NonzeroPureZBlock(AlgorithmFailure):
    pass


class NoCoupling(AlgorithmFailure):
    pass


class ZetaNotReduced(AlgorithmFailure):
    pass


class ReconstructionMismatch(AlgorithmFailure):
    pass
