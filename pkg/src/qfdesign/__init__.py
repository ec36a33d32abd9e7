"""Indicator functions, geometric isomorphism and beta aberration for factorial designs."""

from qfdesign.aberration import (
    WordlengthPattern,
    alpha_wlp,
    beta_wlp,
    compare_wlp,
    custom_wlp,
    resolution,
    strength,
)
from qfdesign.aliasing import contrast_correlation, structure_constants
from qfdesign.basis import (
    ContrastBasis,
    Design,
    DesignSpace,
    FactorBasis,
    MultiIndex,
    build_opb,
    contrast_value,
    opb_basis,
    verify_basis,
)
from qfdesign.indicator import (
    CoefficientTable,
    coefficients,
    combine,
    evaluate_indicator,
    project,
    sum_of_squares,
)
from qfdesign.isomorphism import (
    CombTransform,
    GeomTransform,
    apply_comb,
    apply_geom,
    classify_geometric,
    comb_isomorphic,
    geom_isomorphic,
    check_transform_relation,
)
from qfdesign.search import (
    builtin_l18,
    enumerate_variants,
    level_permutation_reps,
    min_aberration_projection,
)

__all__ = [
    "CoefficientTable", "CombTransform", "ContrastBasis", "Design", "DesignSpace",
    "FactorBasis", "GeomTransform", "MultiIndex", "WordlengthPattern", "alpha_wlp",
    "apply_comb", "apply_geom", "beta_wlp", "build_opb", "builtin_l18",
    "classify_geometric", "coefficients", "comb_isomorphic", "combine", "compare_wlp",
    "contrast_correlation", "contrast_value", "custom_wlp", "enumerate_variants",
    "evaluate_indicator", "geom_isomorphic", "level_permutation_reps",
    "min_aberration_projection", "opb_basis", "project", "resolution", "strength",
    "structure_constants", "sum_of_squares", "check_transform_relation", "verify_basis",
]
