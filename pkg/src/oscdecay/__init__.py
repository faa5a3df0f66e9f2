"""Newton-polyhedron invariants and numerical decay verification for
oscillatory integrals with polynomial phases."""

__version__ = "0.1.0"

from .phase import (
    CutoffSpec,
    Phase,
    PhaseFormatError,
    cutoff_profile,
    make_phase,
    parse_cutoff,
    parse_phase,
    phase_to_dict,
    phase_to_json,
)
from .polytope import (
    DegeneratePolyhedronError,
    Face,
    FacetNormal,
    NewtonPolyhedron,
    build_polyhedron,
    codim_of_point,
    contains_point,
    contains_point_lp,
    floor_functional,
    is_convenient,
    newton_distance,
    polyhedron_report,
    supporting_check,
)
from .nondegeneracy import (
    DEGENERATE,
    INCONCLUSIVE,
    NONDEGENERATE,
    FacePolynomial,
    NondegeneracyVerdict,
    check_k_nondegenerate,
    check_nondegenerate,
    face_polynomial,
)
from .ladder import (
    ExponentLadder,
    ExponentTerm,
    UnboundedEnumerationError,
    arithmetic_progressions,
    exponent_ladder,
    leading_term,
)
from .bounds import (
    ConstantsReport,
    DegeneratePhaseError,
    DyadicRatioTable,
    box_bound_check,
    constants_report,
    dyadic_bound_sum,
    gradient_ratio_table,
    theoretical_bound,
)
from .quadrature import (
    CollinearBasisError,
    DecayFit,
    ExpansionFit,
    FitWindowError,
    PanelBudgetError,
    SweepFailureError,
    SweepResult,
    cutoff_mass,
    decay_fit,
    evaluate_integral,
    expansion_fit,
    lambda_sweep,
    synthetic_sweep,
)
