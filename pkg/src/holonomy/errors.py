"""Exception hierarchy shared by all modules."""


class HolonomyError(Exception):
    """Base class for every error raised by the package."""


class GroupError(HolonomyError, ValueError):
    pass


class DescriptorMismatch(GroupError):
    """Two elements (or a hom and an element) live in different groups."""


class EnumerationCapExceeded(GroupError):
    pass


class WalkError(HolonomyError, ValueError):
    """Endpoint mismatch, unknown edge, or a loop based at the wrong vertex."""


class GraphError(HolonomyError, ValueError):
    pass


class DisconnectedGraph(GraphError):
    pass


class DiagramViolation(HolonomyError):
    """A proposed holonomy isomorphism fails the commuting-diagram law."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsuitableGraph(HolonomyError):
    pass


class SearchBoundsExceeded(HolonomyError):
    """A search hit its configured bound; the answer is inconclusive."""


class ParseError(HolonomyError, ValueError):
    def __init__(self, message, location="$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class NumericalError(HolonomyError, ValueError):
    """Non-finite values or malformed numeric input."""
