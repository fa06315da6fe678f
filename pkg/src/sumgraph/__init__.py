"""Summary graphs, MAGs and confounding audits for triangular generating
systems, verified against a Gaussian linear-system oracle."""

from .edge_matrix import (
    EdgeMatrixError,
    SingularBlockError,
    ancestor_closure,
    indicator,
    partial_close,
    partial_invert,
)
from .graph_model import (
    ARROW,
    DASHED,
    FULL,
    Edge,
    GraphModelError,
    Mag,
    ParentGraph,
    PlacementError,
    SummaryGraph,
    classify,
    from_edge_list,
    parent_to_summary,
    to_edge_list,
    validate_parent,
    validate_summary,
)
from .transform import (
    InvalidSpecError,
    MarginalConditionSpec,
    SplitRecord,
    induced_concentration_graph,
    induced_covariance_graph,
    mag_from_summary,
    regression_graph_from_parent,
    spec_of,
    step_condition,
    step_marginalise,
    stepwise_reduce,
    summary_from_parent,
    summary_from_summary,
)
from .queries import (
    IndependenceQuery,
    PathWitness,
    Verdict,
    equivalence_obstruction,
    implies_independence,
    local_markov,
    separate_concentration,
    separate_covariance,
)
from .confounding import (
    ConfoundingReport,
    audit_edge,
    identification_hint,
    indirect_paths,
)
from .oracle import (
    CovariancePair,
    LinearSummaryModel,
    TriangularSystem,
    derive_linear_summary,
    derive_linear_summary_from_summary,
    implied_covariance,
    mag_coefficients,
    partial_correlation,
    regress,
    sample_system,
    standardized,
    system_from_coefficients,
    verify_structural_zeros,
)

__all__ = [name for name in dir() if not name.startswith("_")]
