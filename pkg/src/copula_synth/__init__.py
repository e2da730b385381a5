"""Synthetic tabular data from Gaussian and t copulas with empirical marginals."""

__version__ = "0.1.0"

from .categorical import CategoricalEncoding, decode_categorical, encode_categorical
from .copula import (
    CopulaFamily,
    CopulaSpec,
    CorrelationMethod,
    fit_correlation_matrix,
    kendall_tau,
    pearson_rho,
    reference_copula,
    sample_gaussian_copula,
    sample_t_copula,
    spearman_rho,
)
from .marginal import Ecdf, ecdf_quantile, fit_ecdf, inverse_transform_column
from .numerics import RandomSource, cholesky, nearest_correlation
from .pipeline import ColumnKind, DataTable, FitConfig, SynthModel, fit, generate, load_model, save_model
from .quality import QualityReport, build_quality_report, correlation_mu_diff, ks_two_sample
from .smote import SmoteConfig, smote_generate, smote_table
