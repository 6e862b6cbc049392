"""Multicategory boosting with Fisher-consistent margin-vector losses."""

from .adaboost_ml import AdaBoostMLClassifier, increment_vector, line_search
from .data import (
    Dataset,
    FirstAppearanceEncoder,
    error_standard_error,
    load_delimited,
    misclassification_error,
    synth_blobs,
)
from .exceptions import InputError, NumericError
from .gentleboost import GentleBoostClassifier
from .losses import (
    LOSSES,
    MarginVector,
    ProbabilityVector,
    empirical_risk,
    expected_risk,
    get_loss,
)
from .population import (
    check_fisher_consistency,
    exponential_minimizer_closed_form,
    least_squares_minimizer_closed_form,
    logit_minimizer,
    margins_to_probabilities,
    population_minimizer,
    random_simplex_point,
)
from .serialize import load_model, save_model
from .tree import (
    FitConfig,
    TreeNode,
    fit_classification_tree,
    fit_regression_tree,
    predict_tree,
    predict_tree_batch,
)

__version__ = "0.1.0"

__all__ = [
    "AdaBoostMLClassifier",
    "Dataset",
    "FirstAppearanceEncoder",
    "FitConfig",
    "GentleBoostClassifier",
    "InputError",
    "LOSSES",
    "MarginVector",
    "NumericError",
    "ProbabilityVector",
    "TreeNode",
    "check_fisher_consistency",
    "empirical_risk",
    "error_standard_error",
    "expected_risk",
    "exponential_minimizer_closed_form",
    "fit_classification_tree",
    "fit_regression_tree",
    "get_loss",
    "increment_vector",
    "least_squares_minimizer_closed_form",
    "line_search",
    "load_delimited",
    "load_model",
    "logit_minimizer",
    "margins_to_probabilities",
    "misclassification_error",
    "population_minimizer",
    "predict_tree",
    "predict_tree_batch",
    "random_simplex_point",
    "save_model",
    "synth_blobs",
]
