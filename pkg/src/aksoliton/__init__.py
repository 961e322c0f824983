"""Almost Kähler structures on Lie algebras: curvature, moment maps, minimal
compatible metrics and algebraic soliton certificates."""
from __future__ import annotations

from .curvature import (
    CurvatureReport,
    chern_ricci_form,
    chern_ricci_operator,
    curvature_report,
    h_hat,
    moment_map_gl,
    nilpotency_defect,
    ric_ac,
    ricci,
    scalar_curvature,
)
from .git_engine import (
    MinimalMetricResult,
    WeightSystem,
    beta_point,
    minimal_metric_solve,
    nice_basis_check,
    positive_solution,
    weight_set,
)
from .lie_core import (
    LieBracket,
    act_basis_change,
    derivation_basis,
    derivation_defect,
    jacobi_defect,
    mu_norm,
    nilpotency_step,
)
from .soliton import SolitonCertificate, certify_soliton, scalar_plus_derivation
from .symplectic import (
    AlmostComplexStructure,
    TwoForm,
    canonical_form,
    closedness_defect,
    darboux_normalize,
    j_operator,
    proj_sp,
)

__version__ = "0.1.0"
