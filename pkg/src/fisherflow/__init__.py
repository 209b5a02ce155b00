"""fisherflow: Fisher-Rao geometry of learning on finite state spaces.

Distributions with hidden units live on a joint simplex that fibers over
the visible simplex by marginalization.  This package implements the
metric, the natural gradients of the usual learning objectives (KL,
cross entropy, divergence from the data manifold, the ELBO), the
horizontal/vertical splitting of joint tangent vectors, parametric
submodels with cylindricity and pushforward-invariance diagnostics,
Bayes nets with block-orthogonal Fisher matrices, and a seeded
experiment harness with a CLI.
"""

from .backend import backend_name
from .bayesnet import (
    BayesNetModel,
    Dag,
    bn_jacobian,
    block_natural_gradient,
    chain_dag,
    collider_dag,
    diamond_dag,
    fork_dag,
    joint_eval,
    load_bayesnet,
    orthogonality_audit,
    to_model,
    vh_chain_model,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    GeometryError,
    MissingRecognition,
    NearSingularFisherWarning,
    NonPositiveEntry,
    RangeMismatch,
    SingularPoint,
    StepTooLarge,
)
from .fibration import (
    HVDecomposition,
    JointSpace,
    conditional_h_given_v,
    dpi_v,
    hv_decompose,
    joint_space,
    marginalize_v,
    nat_grad_dist_to_Q,
    project_to_data_manifold,
    vertical_basis,
)
from .model import (
    CylindricityReport,
    FisherMatrix,
    ParametricModel,
    cylindricity_check,
    fisher_matrix,
    fisher_solve,
    full_simplex_model,
    independence_model,
    jacobian_matrix,
    log_odds,
    natural_param_gradient,
    product_log_odds,
    product_model,
    project_onto_tangent,
    pushforward_invariance_gap,
    random_tied_pair,
    tied_model,
    tied_visible_model,
)
from .objectives import (
    ObjectiveContext,
    cross_entropy,
    cross_entropy_grad,
    dist_to_Q,
    dist_to_Q_grad,
    dist_to_Q_via_projection,
    dq_grad,
    dq_objective,
    elbo_expected,
    elbo_grad,
    elbo_pointwise,
    kl_visible,
    kl_visible_grad,
    target_log_mass,
)
from .oracle import fd_natural_gradient
from .rng import (
    default_rng,
    random_distribution,
    random_tangent,
    tempered_distribution,
)
from .simplex import (
    Distribution,
    StateSpace,
    TangentVector,
    fisher_inner,
    fisher_norm,
    kl_divergence,
    make_distribution,
    nat_grad_from_partials,
    nat_grad_kl_first,
    nat_grad_kl_second,
)

__version__ = "0.1.0"

__all__ = [
    "BayesNetModel",
    "ConfigError",
    "CylindricityReport",
    "Dag",
    "DimensionMismatch",
    "Distribution",
    "FisherMatrix",
    "GeometryError",
    "HVDecomposition",
    "JointSpace",
    "MissingRecognition",
    "NearSingularFisherWarning",
    "NonPositiveEntry",
    "ObjectiveContext",
    "ParametricModel",
    "RangeMismatch",
    "SingularPoint",
    "StateSpace",
    "StepTooLarge",
    "TangentVector",
    "backend_name",
    "bn_jacobian",
    "block_natural_gradient",
    "chain_dag",
    "collider_dag",
    "conditional_h_given_v",
    "cross_entropy",
    "cross_entropy_grad",
    "cylindricity_check",
    "default_rng",
    "diamond_dag",
    "dist_to_Q",
    "dist_to_Q_grad",
    "dist_to_Q_via_projection",
    "dpi_v",
    "dq_grad",
    "dq_objective",
    "elbo_expected",
    "elbo_grad",
    "elbo_pointwise",
    "fd_natural_gradient",
    "fisher_inner",
    "fisher_matrix",
    "fisher_norm",
    "fisher_solve",
    "fork_dag",
    "full_simplex_model",
    "hv_decompose",
    "independence_model",
    "jacobian_matrix",
    "joint_eval",
    "joint_space",
    "kl_divergence",
    "kl_visible",
    "kl_visible_grad",
    "load_bayesnet",
    "log_odds",
    "make_distribution",
    "marginalize_v",
    "nat_grad_dist_to_Q",
    "nat_grad_from_partials",
    "nat_grad_kl_first",
    "nat_grad_kl_second",
    "natural_param_gradient",
    "orthogonality_audit",
    "product_log_odds",
    "product_model",
    "project_onto_tangent",
    "project_to_data_manifold",
    "pushforward_invariance_gap",
    "random_distribution",
    "random_tangent",
    "random_tied_pair",
    "target_log_mass",
    "tempered_distribution",
    "tied_model",
    "tied_visible_model",
    "to_model",
    "vertical_basis",
    "vh_chain_model",
]
