"""Recursive autoregressive multifidelity Gaussian process regression.

Fit hyperparameters by maximum likelihood (`fit`), or condition on fixed ones
(`condition`), then query posterior mean/variance (`predict`) and the
cross-fidelity posterior correlation (`posterior_correlation`).
"""

from pamfbo.mfgp.data import ObservationSet
from pamfbo.mfgp.fitting import fit
from pamfbo.mfgp.kernel import assemble_kernel_matrix, cross_covariance, gaussian_kernel_matrix, kernel
from pamfbo.mfgp.likelihood import log_marginal_likelihood
from pamfbo.mfgp.model import MfGpModel, PosteriorStats, condition, posterior_correlation, predict
from pamfbo.mfgp.report import FitReport, LevelFitReport
from pamfbo.mfgp.serialization import dump_model, load_model

__all__ = [
    "ObservationSet",
    "MfGpModel",
    "PosteriorStats",
    "FitReport",
    "LevelFitReport",
    "kernel",
    "gaussian_kernel_matrix",
    "cross_covariance",
    "assemble_kernel_matrix",
    "log_marginal_likelihood",
    "fit",
    "condition",
    "predict",
    "posterior_correlation",
    "dump_model",
    "load_model",
]
