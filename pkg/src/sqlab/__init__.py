"""Desk-scale numerical checks for intrinsic square functions.

The package turns the continuum objects into finite, auditable computations:
sampled fields on uniform boxes, a kernel polytope whose supremum is a
linear program, geometric time ladders, weighted norms with per-ball
reports, and inequality suites whose constants carry provenance.
"""

from .grid import (
    GridSpec,
    QuadratureRule,
    SampledField,
    TimeLadder,
    convolve_batch,
    convolve_scaled,
    field_from_csv,
    field_to_csv,
    grid_weights,
    integrate,
    interpolate,
)
from .kernels import (
    AalphaField,
    HolderClassSpec,
    KernelProgram,
    SolveResult,
    SolverError,
    a_alpha,
    a_alpha_field,
    assemble_program,
    dictionary_kernels,
    dictionary_responses,
    modulated_a_alpha,
    solve_program,
    support_inside_box,
)
from .reports import InequalityReport, SuiteReport, digest_of
from .spaces import (
    MorreyParams,
    NormReport,
    ball_average,
    bmo_norm,
    bmo_oscillation,
    lebesgue_norm,
    morrey_norm,
    weighted_maximal,
)
from .sqfn import (
    SqfnResult,
    commutator_g_alpha,
    commutator_g_star,
    commutator_s_alpha,
    g_alpha,
    g_star,
    s_alpha_beta,
)
from .verify import (
    ConfigGateError,
    TestFamilySpec,
    aperture_scaling_suite,
    bmo_growth_suite,
    boundedness_suite,
    commutator_split_suite,
    emit_report,
    extend_family,
    generate_members,
    gstar_domination_suite,
    holder_average_suite,
    indicator_field,
    operator_field,
    require_gstar_admissible,
    sample_member,
    step_field,
    subset_doubling_suite,
)
from .weights import (
    ApReport,
    Ball,
    BallFamily,
    DoublingReport,
    WeightSpec,
    ap_characteristic,
    ball_nodes,
    ball_volume,
    doubling_report,
    dual_weight,
    rh_constant,
    rh_quotient,
    subset_ratio_check,
    weighted_measure,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "QuadratureRule",
    "SampledField",
    "TimeLadder",
    "convolve_batch",
    "convolve_scaled",
    "field_from_csv",
    "field_to_csv",
    "grid_weights",
    "integrate",
    "interpolate",
    "AalphaField",
    "HolderClassSpec",
    "KernelProgram",
    "SolveResult",
    "SolverError",
    "a_alpha",
    "a_alpha_field",
    "assemble_program",
    "dictionary_kernels",
    "dictionary_responses",
    "modulated_a_alpha",
    "solve_program",
    "support_inside_box",
    "InequalityReport",
    "SuiteReport",
    "digest_of",
    "MorreyParams",
    "NormReport",
    "ball_average",
    "bmo_norm",
    "bmo_oscillation",
    "lebesgue_norm",
    "morrey_norm",
    "weighted_maximal",
    "SqfnResult",
    "commutator_g_alpha",
    "commutator_g_star",
    "commutator_s_alpha",
    "g_alpha",
    "g_star",
    "s_alpha_beta",
    "ConfigGateError",
    "TestFamilySpec",
    "aperture_scaling_suite",
    "bmo_growth_suite",
    "boundedness_suite",
    "commutator_split_suite",
    "emit_report",
    "extend_family",
    "generate_members",
    "gstar_domination_suite",
    "holder_average_suite",
    "indicator_field",
    "operator_field",
    "require_gstar_admissible",
    "sample_member",
    "step_field",
    "subset_doubling_suite",
    "ApReport",
    "Ball",
    "BallFamily",
    "DoublingReport",
    "WeightSpec",
    "ap_characteristic",
    "ball_nodes",
    "ball_volume",
    "doubling_report",
    "dual_weight",
    "rh_constant",
    "rh_quotient",
    "subset_ratio_check",
    "weighted_measure",
    "__version__",
]
