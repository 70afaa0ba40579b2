"""Exception hierarchy shared by every module."""


class AntipodeError(Exception):
    """Base class for all errors raised by this package."""


class MetricError(AntipodeError, ValueError):
    """A matrix or weight vector fails the metric-space axioms."""


class Asymmetric(MetricError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"d({i},{j}) != d({j},{i})")


class NegativeDistance(MetricError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"d({i},{j}) < 0")


class CoincidentPoints(MetricError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"d({i},{j}) = 0 for distinct points")


class NonzeroDiagonal(MetricError):
    def __init__(self, i):
        self.i = i
        super().__init__(f"d({i},{i}) != 0")


class TriangleViolation(MetricError):
    """``d(i, j) > d(i, k) + d(k, j)``; the witness is ``(i, j, k)``."""

    def __init__(self, i, j, k):
        self.i, self.j, self.k = i, j, k
        super().__init__(f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})")

    @property
    def witness(self):
        return (self.i, self.j, self.k)


class BadWeights(MetricError):
    pass


class DimensionMismatch(AntipodeError, ValueError):
    pass


class DegenerateSpace(AntipodeError, ValueError):
    pass


class OffDiagonalUndefined(DegenerateSpace):
    pass


class EvidenceRequired(AntipodeError):
    """No isometry evidence was available to map a point onto its antipode."""


class NotUniquelyAntipodal(AntipodeError):
    def __init__(self, x, count):
        self.x, self.count = x, count
        super().__init__(f"point {x} has {count} antipodes")


class NotIsometry(AntipodeError):
    def __init__(self, x, y):
        self.x, self.y = x, y
        super().__init__(f"map does not preserve d({x},{y})")


class InconsistentWithBound(AntipodeError):
    """Strict antipodality and lower-bound tightness disagree on a homogeneous input."""


class GraphError(AntipodeError, ValueError):
    pass


class BadParameter(GraphError):
    pass


class TooLarge(GraphError):
    pass


class NotSymmetricConnectionSet(GraphError):
    pass


class ContainsIdentity(GraphError):
    pass


class Disconnected(GraphError):
    def __init__(self, component):
        self.component = tuple(component)
        super().__init__(f"graph is disconnected; component of vertex {self.component[0]} "
                         f"has {len(self.component)} vertices")


class NoCertificate(GraphError):
    pass


class NotAutomorphism(GraphError):
    pass


class Inconclusive(AntipodeError):
    """Automorphism search was truncated and no invariant separates the vertices."""


class NotPrime(AntipodeError, ValueError):
    pass


class BadDimension(AntipodeError, ValueError):
    pass


class FormatError(AntipodeError, ValueError):
    """An input file could not be parsed."""
