"""Exception hierarchy shared by the whole package."""

from __future__ import annotations


class TropgalError(Exception):
    """Base class for every error raised by tropgal."""


class ModelError(TropgalError):
    """A curve description does not define a valid tropical curve model."""


class EmptyGraph(ModelError):
    pass


class Disconnected(ModelError):
    pass


class NonpositiveLength(ModelError):
    pass


class InfinityOnNonLeafEdge(ModelError):
    pass


class MissingInfiniteEnd(ModelError):
    pass


class UnknownItem(ModelError):
    pass


class OffsetOutOfRange(TropgalError):
    pass


class MorphismError(TropgalError):
    """A morphism representation violates the finite-morphism conditions."""

    def __init__(self, message: str, edge: str | None = None):
        super().__init__(message)
        self.edge = edge


class EndpointMismatch(MorphismError):
    pass


class LengthScaleViolation(MorphismError):
    pass


class InfiniteEdgeTargetFinite(MorphismError):
    pass


class NotHarmonicAt(MorphismError):
    def __init__(self, vertex: str, sums: dict):
        super().__init__(f"not harmonic at {vertex}: incident sums {sums}")
        self.vertex = vertex
        self.sums = sums


class DegreeInconsistentAt(MorphismError):
    def __init__(self, sums: dict):
        super().__init__(f"fiber degree sums differ: {sums}")
        self.sums = sums


class IncompatibleMiddleCurve(TropgalError):
    pass


class RefinementConflict(TropgalError):
    """Breakpoints of a refinement cannot be transported along a map."""


class FibersDoNotRefine(TropgalError):
    def __init__(self, witness):
        super().__init__(f"fibers do not refine: {witness}")
        self.witness = witness


class GroupError(TropgalError):
    pass


class NotBijective(GroupError):
    pass


class LengthNotPreserved(GroupError):
    pass


class InfinityNotPreserved(GroupError):
    pass


class CapExceeded(GroupError):
    pass


class MixedCurves(GroupError):
    pass


class RequiresEquivariantModel(GroupError):
    pass


class GroupTooLarge(GroupError):
    pass


class NotNormal(GroupError):
    pass


class GaloisError(TropgalError):
    pass


class NotInvariant(GaloisError):
    def __init__(self, element: str):
        super().__init__(f"covering is not invariant under {element}")
        self.element = element


class PsiNotInvariant(NotInvariant):
    pass


class NotFiniteHarmonic(GaloisError):
    pass


class NotGaloisCovering(GaloisError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class PsiNotInAPrime(GaloisError):
    pass


class InducedActionIllDefined(GaloisError):
    pass


class PhiNotNormal(GaloisError):
    pass


class CompositionMismatch(GaloisError):
    pass


class TheoremViolation(GaloisError):
    """A property guaranteed by the theory failed on a concrete instance.

    Raised only when the library computes something the mathematics rules
    out, so it always indicates a bug or a malformed input that slipped past
    validation.
    """


class ParseError(TropgalError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownExample(TropgalError):
    pass
