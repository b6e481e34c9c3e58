"""Exception hierarchy.

``InputError`` covers malformed or out-of-domain input (CLI exit code 2),
``PreconditionError`` covers well-formed input on which an operation is not
defined, e.g. tracing a flex from a rigid pyramid (CLI exit code 3).
"""


class PyramidError(Exception):
    pass


class InputError(PyramidError, ValueError):
    pass


class PreconditionError(PyramidError):
    pass


# geometry
class InvalidLengths(InputError):
    pass


class DegenerateEdge(InputError):
    pass


class NonCoplanarBase(InputError):
    pass


class FlatPyramid(InputError):
    pass


# face-vector census
class InvalidFaceVector(InputError):
    pass


class NonIntegralCount(InputError):
    pass


# solver
class CollinearABD(PreconditionError):
    """A, B and D collinear: the apex trilateration is underdetermined."""


class OriginInput(InputError):
    pass


class InvalidParallelogram(InputError):
    pass


class ApexImpossible(InputError):
    pass


# rigidity
class NotARealization(PreconditionError):
    pass


class NotFlexible(PreconditionError):
    """Continuation requested at a point whose rigidity matrix has no 1-D kernel."""


class AmbiguousKernel(PreconditionError):
    pass


class FlexFamilyError(InputError):
    pass


class DiscriminantNegative(FlexFamilyError):
    pass


class HeightImaginary(FlexFamilyError):
    pass


class DivisionBreakdown(FlexFamilyError):
    pass
