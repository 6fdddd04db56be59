"""Causal-diagram fair-sampling verdicts and Bell-scenario numerics."""

from .diagrams import (
    CausalDiagram,
    NodeKind,
    build_diagram,
    latent,
    outcome,
    selection,
    setting,
)
from .dsep import (
    Path,
    PathVerdict,
    ci_probe,
    classify_path,
    d_separated,
    enumerate_paths,
)
from .dsl import parse_diagram, serialize_scenario
from .lhv import (
    BehaviorTable,
    BellFunctional,
    LhvModel,
    attach_selection,
    behavior_from_lhv,
    chsh,
    enumerate_local_vertices,
    evaluate_functional,
    is_local,
    postselect,
    pr_box,
    recompute_local_bound,
)
from .verifier import (
    DirectConditioning,
    FsaVerdict,
    ScenarioSpec,
    SelectionNode,
    check_ci,
    check_cii,
    detect_franson_obstruction,
    make_scenario,
    partition_outcomes,
    verify,
    verify_fsa,
    verify_fsa_hybrid,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorTable",
    "BellFunctional",
    "CausalDiagram",
    "DirectConditioning",
    "FsaVerdict",
    "LhvModel",
    "NodeKind",
    "Path",
    "PathVerdict",
    "ScenarioSpec",
    "SelectionNode",
    "attach_selection",
    "behavior_from_lhv",
    "build_diagram",
    "check_ci",
    "check_cii",
    "chsh",
    "ci_probe",
    "classify_path",
    "d_separated",
    "detect_franson_obstruction",
    "enumerate_local_vertices",
    "enumerate_paths",
    "evaluate_functional",
    "is_local",
    "latent",
    "make_scenario",
    "outcome",
    "parse_diagram",
    "partition_outcomes",
    "postselect",
    "pr_box",
    "recompute_local_bound",
    "selection",
    "serialize_scenario",
    "setting",
    "verify",
    "verify_fsa",
    "verify_fsa_hybrid",
]
