"""Causal DAG workbench.

Parse causal diagrams, answer separation and identification queries
with path-level explanations, derive testable implications, and check
the answers numerically with a linear-Gaussian simulation harness.
"""

from .errors import (
    ConditionOnLatent,
    CorruptCorpus,
    CycleError,
    DataError,
    DuplicateNode,
    EgpError,
    EmptyArm,
    GraphError,
    InsufficientSample,
    InvalidQuery,
    LatentAdjusted,
    LatentInSet,
    MissingColumn,
    NotAdmissible,
    SelfLoop,
    SingularDesign,
    UnknownEdgeInSpec,
    UnknownEndpoint,
    UnknownNode,
    WeakInstrumentWarning,
)
from .graph import (
    BIDIRECTED,
    DIRECTED,
    CausalGraph,
    Edge,
    NodeRole,
    build_graph,
    mutilate_incoming,
    mutilate_outgoing,
    remove_edge,
)
from .dsl import ParseError, ParseResult, ParseWarning, SourceSpan, parse, parse_source, serialize
from .separation import CIStatement, PathReport, PathSet, d_separated, enumerate_paths
from .identify import (
    AdjustmentSearch,
    AdjustmentVerdict,
    IvVerdict,
    backdoor_admissible,
    causal_paths,
    iv_check,
    minimal_adjustment_sets,
)
from .implications import (
    Factor,
    Factorization,
    implied_independencies,
    local_markov,
    truncated_factorization,
)
from .sem import (
    CiTestResult,
    Dataset,
    Do,
    EstimandReport,
    EstimateResult,
    ModelFitReport,
    PoTable,
    PositivityReport,
    SemModel,
    SensitivityReport,
    bias_decomposition,
    ci_test,
    estimate,
    instantiate_sem,
    model_fit_report,
    positivity_check,
    sample,
    sample_potential_outcomes,
    sensitivity_sweep,
    true_effect,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
