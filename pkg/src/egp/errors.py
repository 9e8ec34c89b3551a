"""Exception types shared across the package.

Every error carries a short stable ``code`` so the CLI and the HTTP
service can surface machine-readable failures without string matching.
"""

from __future__ import annotations


class EgpError(Exception):
    """Base class for all package errors."""

    code = "error"


class GraphError(EgpError):
    """Structural problem while building or validating a graph."""

    code = "graph"


class CycleError(GraphError):
    """The directed part of the graph has a cycle.

    Attributes
    ----------
    cycle : list of str
        One witnessing cycle, first node repeated at the end.
    """

    code = "cycle"

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("directed cycle: " + " -> ".join(self.cycle))


class DuplicateNode(GraphError):
    code = "duplicate-node"


class UnknownEndpoint(GraphError):
    code = "unknown-endpoint"


class SelfLoop(GraphError):
    code = "self-loop"


class LatentAdjusted(GraphError):
    """A node cannot be both latent and marked as adjusted-for."""

    code = "latent-adjusted"


class UnknownNode(EgpError):
    """A query referenced a node that is not declared in the graph."""

    code = "unknown-node"


class InvalidQuery(EgpError):
    """Query arguments violate a precondition (overlap, empty set, ...)."""

    code = "invalid-query"


class ConditionOnLatent(InvalidQuery):
    """The conditioning set of a separation query contains a latent node."""

    code = "condition-on-latent"


class LatentInSet(InvalidQuery):
    """A covariate set that must be observable contains a latent node."""

    code = "latent-in-set"


class UnknownEdgeInSpec(EgpError):
    """A coefficient was supplied for an edge the graph does not have."""

    code = "unknown-edge"


class DataError(EgpError):
    code = "data"


class MissingColumn(DataError):
    code = "missing-column"


class SingularDesign(DataError):
    """Design matrix or correlation matrix is numerically singular."""

    code = "singular-design"


class InsufficientSample(DataError):
    """Too few rows for the requested test's degrees of freedom."""

    code = "insufficient-sample"


class EmptyArm(DataError):
    """An estimand needs both treated and control rows."""

    code = "empty-arm"


class NotAdmissible(EgpError):
    """The supplied adjustment set fails the backdoor criterion."""

    code = "not-admissible"


class CorruptCorpus(EgpError):
    """A bundled corpus entry is unreadable or self-inconsistent."""

    code = "corrupt-corpus"


class WeakInstrumentWarning(UserWarning):
    """First-stage F statistic below the conventional strength threshold."""
