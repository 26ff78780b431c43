"""Typed errors shared across the library.

Every error that a caller can meaningfully branch on gets its own class;
all inherit from ConeOrderError so blanket handling stays possible.
"""


class ConeOrderError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(ConeOrderError):
    """Vector or matrix has the wrong length for the ambient space."""


class NotPointed(ConeOrderError):
    """Operation requires a pointed cone (C with C and -C meeting only at 0)."""


class NotGenerating(ConeOrderError):
    """Operation requires a generating (full-dimensional span) cone."""


class NotInCone(ConeOrderError):
    """Vector expected inside the cone is not."""


class NotComparable(ConeOrderError):
    """Pair of points is not ordered the way the operation requires."""


class NotOrderUnit(ConeOrderError):
    """Vector fails the strict facet inequalities defining an order unit."""


class RayIsEngaged(ConeOrderError):
    """Split requested along a ray that is engaged."""


class NotConeMap(ConeOrderError):
    """Candidate linear map does not carry the source cone onto the target."""


class NotSimplicial(ConeOrderError):
    """Cone generators are linearly dependent where independence is required."""


class MapCountMismatch(ConeOrderError):
    """Number of scalar maps does not match the number of generators."""


class OutOfDomain(ConeOrderError):
    """Point lies outside the domain of the map being evaluated."""


class NotExtreme(ConeOrderError):
    """Vector is not an extreme vector of the cone."""


class SameRay(ConeOrderError):
    """Two vectors lie on the same ray where distinct rays are required."""


class NotColinear(ConeOrderError):
    """Difference vectors expected to be parallel are not; flags a non-isomorphism."""


class DegenerateSpan(ConeOrderError):
    """Supplied points do not affinely span enough directions for the fit."""


class UndefinedLattice(ConeOrderError):
    """A supremum or infimum requested inside an expression does not exist.

    Carries the path of child indices from the root to the failing node and
    any witnesses (for example two incomparable minimal upper bounds).
    """

    def __init__(self, path, detail="", witnesses=None):
        self.path = tuple(path)
        self.witnesses = witnesses
        super().__init__(f"no least upper/greatest lower bound at node {self.path}: {detail}")


class InternalInconsistency(ConeOrderError):
    """An exact test and its sampled battery disagree; indicates a bug."""


class NotUnit(ConeOrderError):
    """Vector expected to have unit Euclidean norm does not."""


class NotSymmetric(ConeOrderError):
    """Matrix asymmetry exceeds the construction tolerance."""


class NotPositiveDefinite(ConeOrderError):
    """Matrix expected positive definite has a nonpositive eigenvalue."""


class ParseError(ConeOrderError):
    """Input file or inline argument does not match the documented format."""
