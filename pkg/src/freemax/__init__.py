"""Transforms, additive convolution powers and max-convolutions of probability laws on [0, inf)."""

from .dist_core import (
    BetaLaw,
    BooleanStablePos,
    Cdf,
    ClassicalStablePos,
    Dagum,
    Dilated,
    Dirac,
    Exponential,
    Frechet,
    FreeStablePos,
    GridMeasure,
    Gumbel,
    Law,
    MarchenkoPastur,
    MaxCompoundPoisson,
    Pareto,
    Poisson,
    TwoPoint,
    Uniform01,
    Weibull,
    cdf_eval,
    dilate,
    grid_from_law,
    moments_ab,
    power_pushforward,
    quantile,
)
from .errors import ContractError, FreemaxError, NumericalError, UnsupportedLawError
from .maxconv import (
    MaxPowerSpec,
    b_t_vee,
    boolean_max_pow,
    classical_max_pow,
    free_max_pow,
    lambda_vee,
    max_convolve,
    pi_vee,
    x_vee,
    x_vee_inv,
)
from .phi_psi import (
    PhiResult,
    VerificationReport,
    chi_inverse_catalog,
    phi,
    psi_op,
    stable_s_transforms,
    verify_diagram_poisson,
    verify_free_regular_formula,
    verify_limit_props,
    verify_mult_identity,
    verify_thm_bn,
    verify_thm_boolean,
    verify_thm_classical,
    verify_thm_free,
)
from .randmat import (
    SpectrumSample,
    ginibre_product_spectrum,
    ks_distance,
    mean_ks,
    sample_batch,
    sample_wishart_spectrum,
)
from .transforms import (
    HalfPlanePoint,
    STransform,
    boolean_add_power,
    boolean_add_power_s,
    cauchy,
    dilation_s_rule,
    f_and_self_energy,
    free_add_power,
    free_add_power_s,
    free_mult_power_s,
    psi_transform,
    s_transform,
    stieltjes_density,
    subordination,
)

__version__ = "0.1.0"
