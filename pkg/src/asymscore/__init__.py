"""Asymmetry analysis for proper scoring rules.

Seven losses for probabilistic forecasts (log, quadratic, spherical, CRPS,
threshold-weighted CRPS, energy, Dawid-Sebastiani), their induced
divergences, numerical verification of over/under-estimation asymmetries
on scale, location, and exponential families, hedging under distribution
shift, and desk-scale experiment pipelines with a CLI.
"""

from .asymmetry import (
    AsymmetryVerdict,
    ScalingFunction,
    expfam_verdict,
    family_parameter_verdict,
    lambert_w,
    location_verdict,
    loss_diff_root,
    power_crps_trichotomy,
    scale_verdict,
    scaling_exponent,
    sweep_expfam,
    sweep_location,
    sweep_scale,
    write_verdict_csv,
)
from .divergence import (
    DivergenceValue,
    cramer,
    divergence,
    energy_distance,
    expected_loss,
    expected_loss_mc,
    expected_loss_quad,
    kl,
    weighted_cramer,
)
from .errors import AsymscoreError
from .families import (
    AffineDistribution,
    AsymmetricLaplace,
    Distribution,
    ExpFamDescriptor,
    LocationFamily,
    MixtureDistribution,
    ScaleFamily,
    digamma,
    expfam_descriptor,
    location_family,
    make_family,
    scale_family,
    trigamma,
)
from .forecasts import (
    Ensemble,
    KdeDensity,
    QuantileForecast,
    TailExtendedDensity,
    affine_to,
    kde_fit,
    load_forecasts,
    load_targets,
    quantile_to_distribution,
    validate_quantiles,
)
from .harness import (
    HeatmapGrid,
    RankingTable,
    ScoredRecord,
    asymmetric_laplace_grid,
    dispersion_flip,
    heatmap,
    standardize_targets,
    standardized_ranking,
)
from .hedging import (
    HedgeResult,
    ShiftLaw,
    hedge_expfam_optimum,
    hedge_scale_direction,
    optimal_scale,
    shifted_expected_loss,
)
from .scoring import (
    LossSpec,
    WeightFunction,
    crps_both_forms,
    energy_score,
    score,
    score_vector,
    twcrps_score,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
