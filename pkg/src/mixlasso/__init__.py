"""Gaussian-mixture clustering with clusterwise LASSO paths for feature ranking."""

from .data import Dataset, encode_states, parse_dataset, select_columns, select_rows, standardize
from .gmm import EMConfig, GmmParams, e_step, fit_em, gaussian_logpdf, m_step, map_assign, mixture_logpdf
from .lasso import (
    LassoPath,
    LassoProblem,
    fit_cd,
    grid_path,
    kkt_check,
    lambda_max,
    lars_path,
    soft_threshold,
)
from .modelsel import BicTable, bic, bic_display_transform, count_params, scan_k
from .pca import PcaModel, fit_pca, project
from .pipeline import (
    ClusterRun,
    FeatureRanking,
    PipelineConfig,
    cluster_dataset,
    clusterwise_lasso,
    rank_features,
    run_pipeline,
)
from .synth import SynthSpec, generate_synth, make_surrogate

__version__ = "0.1.0"
