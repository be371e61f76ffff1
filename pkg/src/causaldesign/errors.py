"""Exception types shared across the package."""


class GraphError(ValueError):
    """Malformed graph input (self-loop, bad node id, duplicate edge...)."""


class InvalidStateError(GraphError):
    """Orientation rules would force both directions of a single edge."""


class CapacityError(RuntimeError):
    """Equivalence-class enumeration would exceed the configured cap."""


class NoActionError(RuntimeError):
    """A selection strategy was asked to act on a fully oriented graph."""


class UndefinedRatioError(ValueError):
    """Discovered-edge ratio requested for a graph with zero edges."""


class GenSpecError(ValueError):
    """Unsatisfiable graph-generation spec (e.g. density below connectivity)."""


class EdgeListError(ValueError):
    """Edge-list file failed to parse or does not describe a DAG."""
