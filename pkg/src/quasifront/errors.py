"""Exception types shared across the package."""


class QvpError(Exception):
    """Base class for all solver errors."""


class ValidationError(QvpError):
    """Problem data is structurally invalid (shapes, curvature, boundedness)."""


class DimensionMismatch(QvpError):
    """A vector or matrix has the wrong dimension for this problem."""


class DenominatorNonPositive(QvpError):
    """A fractional objective was evaluated where its denominator is not positive."""


class NonnegativityViolated(QvpError):
    """A convex-over-concave numerator turned negative at an evaluation point."""


class InfeasibleSet(QvpError):
    """The feasible set (possibly with extra constraints) has no admissible point."""


class InfeasiblePoint(QvpError):
    """A point supplied for verification violates the feasible set."""


class BracketInversion(QvpError):
    """The scalarization bracket has upper end below lower end; the bounding box is corrupt."""


class VertexNotInSet(QvpError):
    """The vertex passed to a cut is not present in the vertex set."""


class WNotAbove(QvpError):
    """The boundary point passed to a cut does not dominate the vertex being cut."""


class DenominatorNonPositiveOnSimplex(QvpError):
    """An objective cannot be evaluated on the bounding simplex; the upper corner
    of the outcome box must be supplied in the problem file."""


class IterationCapExceeded(QvpError):
    """The solve loop hit the scalarization safety cap before terminating."""

    def __init__(self, message, scalarizations=None):
        super().__init__(message)
        self.scalarizations = scalarizations


class DegenerateIdealAttained(QvpError):
    """The ideal point itself is an outcome value: the nondominated set is that
    single point and no outer approximation loop is needed."""

    def __init__(self, message, m=None, M=None, witness=None, t=None):
        super().__init__(message)
        self.m = m
        self.M = M
        self.witness = witness
        self.t = t
