"""Margin-based losses conformable to symmetric CDFs.

Losses are built as ``phi(v) = k - int_0^v q(w)^(-1/2) g(w) dw`` from a
symmetric CDF ``G`` (odds ``q = G / (1 - G)``) and an even weight ``g``.
The package also provides the residual/margin identities of logistic
regression, an empirical risk minimiser, AdaBoost with stumps and a
seeded data generator.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .boosting import (BoostModel, BoostStatus, Stump, boost_classify, boost_predict,
                       staged_diagnostics, train_adaboost)
from .data import Dataset, read_csv, write_csv
from .datagen import Contamination, FeatureLaw, GenConfig, generate, load_config
from .distributions import GAUSSIAN, LOGISTIC, UNIFORM, SymmetricCdf, get_cdf
from .errors import (DegenerateMarginError, DegenerateStageError, DomainError, EmptyDatasetError,
                     LabelError, MarginLossError, ParameterError, QuadratureError, UnsupportedError)
from .estimator import (FitOptions, FitResult, FitStatus, ModelSpec, classify, empirical_risk,
                        exp_empirical_risk, expected_score, fit, pnorm_fit, pnorm_objective, predict,
                        risk_gradient, score_at, score_sensitivity, score_variance, soft_probability)
from .losses import (ConformableLoss, conformability_check, convexity_check, exponential_power,
                     loss_derivative, loss_eval, make_loss, named_loss, parse_loss, reparameterize,
                     tabulate)
from .residuals import (contribution_ratio, geometric_mean_contrast, loss_on_residual_scale,
                        margin_of, partition, slrr)
from .weights import WeightFn, check_even, parse_weight

__all__ = [name for name in dir() if not name.startswith("_")]
