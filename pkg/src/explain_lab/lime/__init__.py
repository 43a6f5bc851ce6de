from .KernelSpec import KernelSpec
from .LimeConfig import LimeConfig
from .Neighborhood import MIN_WEIGHT, Neighborhood, sample_neighborhood
from .solvers import (
    lasso_path_support,
    select_then_refit,
    subgradient_residual,
    weighted_elastic_net,
    weighted_ridge,
)
from .explainer import (
    LimeExplainer,
    LimeResult,
    explain,
    fidelity,
    fit_explanation,
    local_consistency,
    weighted_r2,
)
from .export import explanation_from_json, explanation_to_dict, explanation_to_json
