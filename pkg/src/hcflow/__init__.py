"""Hermitian curvature flows on 2-step nilpotent Lie algebras with complex structure."""

__version__ = "0.1.0"

from .algebra import (
    AlgebraMetadata,
    BracketTensor,
    EndoJ,
    HermitianForm,
    LieAlgebraSpec,
    Subspace,
    ValidationReport,
    act,
    bracket_inner,
    bracket_norm,
    center,
    pi_apply,
    unitary_transform,
    validate,
)
from .catalog import catalog
from .curvature import (
    CurvatureBundle,
    TorsionComponents,
    balanced_defect,
    chern_torsion,
    curvature_bundle,
    k_tensor,
    psi_norm,
    q_tensors,
    ricci_11,
    second_chern_ricci,
    theta,
    theta_endomorphism,
    unitary_bracket,
)
from .flows import (
    Driver,
    FlowConfig,
    FlowState,
    TimeSeries,
    bracket_flow,
    equivalence_check,
    functional_F,
    metric_flow,
    normalized_bracket_flow,
)
from .io import export_spec, load_spec
from .soliton import (
    SolitonReport,
    algebraic_promotion_check,
    derivation_space,
    soliton_fit,
    static_residual,
)
