"""Exception types shared across the package.

Every error raised on purpose derives from ThermographError so callers can
catch the whole family at once.  The CLI maps subfamilies to exit codes:
input problems, refused analyses, and exhausted resource caps are kept
distinct.
"""


class ThermographError(Exception):
    """Base class for all errors raised by thermograph."""


class GraphFormatError(ThermographError):
    """Input file or edge list cannot be parsed into a loaded graph."""


class NonPositiveWeight(GraphFormatError):
    """An edge weight is zero or negative; weights must lie in (0, inf)."""


class DuplicateEdge(GraphFormatError):
    """The same ordered vertex pair appears twice in an edge list."""


class PathNotInGraph(ThermographError):
    """A generating path uses an edge absent from the ambient graph."""


class VertexNotInGraph(ThermographError):
    """A requested vertex id does not belong to the graph."""


class EmptyFamily(ThermographError):
    """A generating family of paths is empty; the subgraph is undefined."""


class NotConnected(ThermographError):
    """The operation needs a connected graph (all ordered pairs reachable)."""


class CapExceeded(ThermographError):
    """A configured enumeration or size cap was hit before completion."""


class EnumerationCapExceeded(CapExceeded):
    """Cycle enumeration hit its cap while building a generated subgraph."""


class AllZeroCoefficients(ThermographError):
    """A return series has no positive coefficient; no unit root exists."""


class NoConvergence(ThermographError):
    """An iterative solver did not reach its tolerance within budget."""


class ParameterOutOfRange(ThermographError):
    """A family parameter violates its documented domain."""


class BeyondRadius(ThermographError):
    """Series evaluation requested outside the certified convergence disk."""


class CalibrationFailed(ThermographError):
    """Family normalization could not be certified to its tolerance."""


class Inconclusive(ThermographError):
    """Available certified bounds cannot separate the candidate classes."""


class NotUPLG(ThermographError):
    """The family is not certified unstable-positive, as the scan requires."""


class NoBoundedJumps(ThermographError):
    """The family has no uniform bound on forward jump span."""


class NotNested(ThermographError):
    """Sequence entries are not increasing under subgraph inclusion."""


class TooFewRecords(ThermographError):
    """A verdict needs more records than the report contains."""


class SearchExhausted(CapExceeded):
    """Witness search hit its cap; carries the best partial report found.

    Attributes
    ----------
    report : SequenceReport or None
        Records accumulated before the cap, never discarded silently.
    best_m : int or None
        Largest index probed at the step that failed.
    """

    def __init__(self, message, report=None, best_m=None):
        super().__init__(message)
        self.report = report
        self.best_m = best_m
