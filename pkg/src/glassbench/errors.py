"""Exception types raised by the glassbench library."""


class GlassbenchError(Exception):
    """Base class for all glassbench errors."""


class MaskMismatchError(GlassbenchError):
    """A defect mask references qubits or couplers absent from the graph."""


class CountExceededError(GlassbenchError):
    """Requested more defects than the graph has elements."""


class EmptyGraphError(GlassbenchError):
    """Operation requires a graph with at least one edge."""


class IncompleteAssignmentError(GlassbenchError):
    """A spin assignment does not cover every required variable."""


class NotFullCubeError(GlassbenchError):
    """Isometry operations require a full cubic lattice with equal sides."""


class CapacityExceededError(GlassbenchError):
    """Lattice does not fit the target hardware graph."""


class WrongFamilyError(GlassbenchError):
    """Hardware graph family does not match the requested construction."""


class RangeViolationError(GlassbenchError):
    """A physical coupling value falls outside the allowed [-2, 1] range."""


class TooLargeError(GlassbenchError):
    """Problem exceeds the exhaustive-enumeration variable cap."""


class DomainError(GlassbenchError):
    """Numeric argument outside its mathematical domain."""


class WrongCountError(GlassbenchError):
    """Isometry consistency requires exactly 48 results at one effort."""


class NoOverlapError(GlassbenchError):
    """Result sets share no instance ids."""


class EmptyGroupError(GlassbenchError):
    """Aggregation group contains no solved instances."""


class ConfigError(GlassbenchError):
    """Invalid experiment or sampler configuration."""
