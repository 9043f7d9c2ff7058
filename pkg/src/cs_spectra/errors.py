"""Exception hierarchy.

Validation errors (bad input, violated preconditions) derive from
``ValidationError``; failures of a numerical hypothesis on otherwise valid
input (tangencies, lattice hits at endpoints, ...) derive from
``NumericalError``.  The CLI maps the two families to exit codes 2 and 3.
"""


class CSError(Exception):
    code = "cs-error"

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.context = context


class ValidationError(CSError, ValueError):
    code = "validation"


class NumericalError(CSError, ArithmeticError):
    code = "numerical"


class NotCoprime(ValidationError):
    code = "not-coprime"


class NotInvertible(ValidationError):
    code = "not-invertible"


class NotOddPrime(ValidationError):
    code = "not-odd-prime"


class BadShape(ValidationError):
    code = "bad-shape"


class NotProbability(ValidationError):
    code = "not-probability"


class NotUnimodular(ValidationError):
    code = "not-unimodular"


class ParabolicMonodromy(ValidationError):
    code = "parabolic-monodromy"


class NotFixedPoint(ValidationError):
    code = "not-fixed-point"


class OffLine(ValidationError):
    code = "off-line"


class NotImmersed(NumericalError):
    code = "not-immersed"


class NonTransverse(NumericalError):
    code = "non-transverse"


class EndpointHit(NumericalError):
    code = "endpoint-hit"


class NonTransverseToLine(NumericalError):
    code = "non-transverse-to-line"


class NonMonotonicUndetected(NumericalError):
    code = "non-monotonic-undetected"


class DegenerateFit(NumericalError):
    code = "degenerate-fit"
