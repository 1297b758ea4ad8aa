"""Bayesian Laplacian regularisation for function estimation on graphs.

The package covers the full pipeline: graph construction and geometry
diagnostics, Gaussian priors defined through functions of the graph
Laplacian, exact spectral posteriors for regression, MCMC posteriors for
binary classification, and contraction-rate experiments.
"""

from .graphs import (
    EdgeListParseError,
    Graph,
    GraphError,
    add_edge,
    add_pendant_vertex,
    cartesian_product,
    delete_edge,
    load_edge_list,
    make_complete,
    make_grid,
    make_ladder,
    make_lollipop,
    make_path,
    make_ring,
    make_torus,
    save_edge_list,
    watts_strogatz,
)
from .spectral import (
    GeometryFit,
    GeometryWindowReport,
    NumericError,
    Spectrum,
    check_geometry_window,
    eig,
    geometry_fit,
    geometry_points,
    inner_n,
    laplacian,
    norm_n,
    sobolev_norm_sq,
    synthetic_power_law_spectrum,
)
from .priors import (
    ConditionalGaussian,
    PriorSpec,
    c_prior_logdensity,
    precision_eigenvalues,
    rkhs_norm_sq,
    sample_c,
    sample_prior,
)
from .inference import (
    ClassificationData,
    ConditionalPosterior,
    GridConfig,
    GridNode,
    MCMCConfig,
    PosteriorSummary,
    RegressionData,
    classification_posterior,
    effective_sample_size,
    link_inverse,
    link_logistic,
    regression_posterior,
    regression_posterior_given_c,
)
from .experiments import (
    RateExperimentConfig,
    RateResult,
    build_family_graph,
    emit_geometry_figure_data,
    make_smooth_truth,
    run_rate_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationData",
    "ConditionalGaussian",
    "ConditionalPosterior",
    "EdgeListParseError",
    "GeometryFit",
    "GeometryWindowReport",
    "Graph",
    "GraphError",
    "GridConfig",
    "GridNode",
    "MCMCConfig",
    "NumericError",
    "PosteriorSummary",
    "PriorSpec",
    "RateExperimentConfig",
    "RateResult",
    "RegressionData",
    "Spectrum",
    "add_edge",
    "add_pendant_vertex",
    "build_family_graph",
    "c_prior_logdensity",
    "cartesian_product",
    "check_geometry_window",
    "classification_posterior",
    "delete_edge",
    "effective_sample_size",
    "eig",
    "emit_geometry_figure_data",
    "geometry_fit",
    "geometry_points",
    "inner_n",
    "laplacian",
    "link_inverse",
    "link_logistic",
    "load_edge_list",
    "make_complete",
    "make_grid",
    "make_ladder",
    "make_lollipop",
    "make_path",
    "make_ring",
    "make_smooth_truth",
    "make_torus",
    "norm_n",
    "precision_eigenvalues",
    "regression_posterior",
    "regression_posterior_given_c",
    "rkhs_norm_sq",
    "run_rate_experiment",
    "sample_c",
    "sample_prior",
    "save_edge_list",
    "sobolev_norm_sq",
    "synthetic_power_law_spectrum",
    "watts_strogatz",
]
