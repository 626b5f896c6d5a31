"""Exact finite-N marginals and propagation of chaos in the random field Curie-Weiss model."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CapacityError,
    FieldSample,
    FieldSpec,
    MarginalTable,
    ModelParams,
    brute_force_marginal,
    dichotomous,
    hamiltonian,
    kl_divergence,
    point_mass,
    product_marginal,
    sample_field,
    spin_words,
    tv_distance,
)
from .landscape import (  # noqa: E402
    ClassificationError,
    LandscapeReport,
    MaximumRecord,
    NumericalError,
    big_g,
    big_g_deriv,
    classify_maximum,
    delta_n,
    empirical_g,
    find_global_maxima,
    tail_radius,
)
from .marginals import (  # noqa: E402
    QuadratureSpec,
    default_quadrature,
    exact_sample,
    log_partition,
    marginal_quadrature,
    predicted_product,
    select_j_index,
)
from .phase import (  # noqa: E402
    H_STAR,
    Regime,
    RegimeLabel,
    classify_regime,
    first_order_beta,
    second_order_beta,
    tricritical_point,
)
from .experiments import (  # noqa: E402
    ExperimentConfig,
    PreconditionError,
    chaos_convergence_scan,
    clt_diagnostic,
    j_index_statistics,
)
