"""Recurrence classification and equilibrium measures for loaded graphs.

A loaded graph is a directed graph with strictly positive edge weights.
The package computes first-return generating series, classifies the
recurrence type from the series at its radius of convergence, builds
equilibrium (Parry) measures on finite graphs, and studies how these
objects converge, or fail to converge, along nested sequences of finite
subgraphs of infinite families.

Heavy kernels run through numba when available; set THERMOGRAPH_NUMBA=0
to force the pure-numpy fallback.
"""

from .cycle_series import (
    ClassKind,
    Classification,
    ReturnSeries,
    classify_family,
    classify_finite,
    enumerate_simple_cycles,
    eval_series,
    first_return_unit_root,
    radius_estimate,
    return_series,
    simple_cycle_sum,
    solve_unit_root,
)
from .equilibrium import (
    EquilibriumMeasure,
    PerronData,
    cylinder_measure,
    kac_residual,
    parry_measure,
    perron_data,
)
from .errors import (
    BeyondRadius,
    CapExceeded,
    EnumerationCapExceeded,
    GraphFormatError,
    Inconclusive,
    NoBoundedJumps,
    NoConvergence,
    NotConnected,
    NotNested,
    NotUPLG,
    ParameterOutOfRange,
    SearchExhausted,
    ThermographError,
    TooFewRecords,
)
from .families import (
    CertifiedValue,
    ChainFamily,
    FamilyDescriptor,
    JumpyFamily,
    PetalFamily,
    chain_family,
    family_eval,
    jumpy_family,
    max_vertex_profile,
    petal_family,
    realize_finite,
)
from .graph_core import (
    Edge,
    LoadedGraph,
    build_graph,
    is_exhaustive_prefix,
    principal_subgraph,
    subgraph_generated_by,
)
from .root_lane import ChainRootLane, RootInfo, root_info, smallest_m_exceeding
from .sequences import (
    SequenceRecord,
    SequenceReport,
    SubgraphSpec,
    Verdict,
    a_of_n,
    build_Gn,
    build_Gnm,
    evaluate_specs,
    irregular_search,
    mix_sequences,
    polynomial_decomposition,
    regular_scan,
    report_to_csv,
    report_to_json,
    structural_gap_check,
    verdict,
)

__version__ = "0.1.0"
