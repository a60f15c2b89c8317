"""Projection-depth weighted multivariate location and scatter estimation.

Depth-weighted estimators average observations with weights that decay in
their projection outlyingness, combining a breakdown point of 1/2 with high
Gaussian efficiency.  The package provides the empirical estimators, the
population closed forms (efficiency constants, influence functions, maximum
bias under point-mass contamination, breakdown formulas) and a seeded Monte
Carlo harness, plus a CLI front end (``pdscatter --help``).
"""

from .asymptotics import (
    AsymptoticConstants,
    are_shape,
    c_constants,
    commutation_matrix,
    g2_index,
    if_pd,
    if_pws,
    lrt_limit_scale,
    s0_eval,
    s_moments,
    sigma_pair,
    t_funcs,
    v_matrix,
)
from .depth import (
    Candidate2D,
    DataMatrix,
    Exact1D,
    OutlyingnessResult,
    Sampled,
    mahalanobis_depth,
    outlyingness_empirical,
    pd_empirical,
    pd_empirical_batch,
    pd_population,
)
from .errors import (
    ContaminationError,
    DegenerateWeightsError,
    DomainError,
    NumericError,
    ParseError,
    PdscatterError,
    SingularDirectionError,
)
from .estimators import ScatterEstimate, phi0, pws_fit, weighted_location, weighted_scatter
from .maxbias import (
    BiasCurve,
    BiasEngine,
    ContaminationGeometry,
    ContaminationMoments,
    bias_coeffs,
    bias_curve,
    contaminated_pws,
    contamination_moments,
    csi_gesi,
    f1_sup,
    f2_sup,
    geometry,
    mad_maxbias,
    mbi,
)
from .model import EllipticalModel, expect_direction, expect_radial, radial_m0
from .simlab import (
    SimConfig,
    SimReport,
    lrt_limit_check,
    rbp_probe,
    rbp_theoretical,
    sample_contaminated,
    benchmark_run,
)
from .univariate import (
    RadialLaw,
    contaminated_med_mad,
    mad_k,
    med_k,
    normal_law,
    solve_d1,
    solve_m,
)
from .weights import WeightSpec, alt_cutoff, default_cutoff, weight_deriv, weight_eval, xi_cutoff

__version__ = "0.1.0"
