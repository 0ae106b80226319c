"""Structural persistence analysis for chemical reaction networks.

Exact rational certificates (conservation laws, positive fluxes, siphon
classifications), network reduction by removing intermediates and
catalysts, verdicts built from those certificates, PTM system and cascade
checks, and a small mass-action simulator for empirical sanity checks.
"""

from .analysis import AnalysisReport, BoundaryVerdict, Verdict, analyze, boundary_steady_state_verdict
from .dynamics import MassActionSystem, TrajectoryRecord, integrate, steady_state_residual, zero_set_siphon_check
from .errors import *  # noqa: F401,F403
from .estimators import PersistenceClassifier, PrimitiveReducer, check_network
from .feasibility import (
    FeasibilityProblem,
    Sign,
    Witness,
    WitnessKind,
    positive_kernel,
    positive_left_kernel,
    semiflow_supported_in,
    signed_combination,
    solve_feasibility,
)
from .fileformat import (
    NetworkDocument,
    corpus_dir,
    corpus_names,
    format_document,
    format_network,
    load,
    load_example,
    parse,
    parse_network,
)
from .network import (
    Complex,
    RationalMatrix,
    Reaction,
    ReactionNetwork,
    build_network,
    components_strongly_connected,
    connected_components,
    implied_subnetwork,
    incidence_matrix,
    is_monomolecular,
    reaction,
    stoichiometric_matrix,
    strongly_connected_components,
)
from .ptm import (
    CascadeSpec,
    InvalidPTMError,
    PTMPartition,
    PTMVerdict,
    cascade_conservation_law,
    cascade_persistence,
    peel_top_layer,
    ptm_persistence,
    underlying_substrate_network,
    validate_cascade,
    validate_ptm,
)
from .reduction import (
    ReductionStep,
    ReductionTrace,
    StepKind,
    conservation_dimension,
    detect_catalysts,
    detect_intermediates,
    lift_conservation_law,
    lift_siphon,
    lift_t_semiflow,
    primitive_reduction,
    project_siphon,
    remove_catalysts,
    remove_intermediates,
    validate_catalysts,
    validate_intermediates,
)
from .report import replay_report, report_to_dict, report_to_json
from .siphons import (
    classify_siphon,
    drainable_siphon,
    is_minimal_siphon,
    is_siphon,
    minimal_siphons,
    self_replicable_siphon,
    siphon_psemiflow_property,
)

__version__ = "0.1.0"
