"""Structured variable selection for support vector machines."""

import json

from ._core import (
    ConfigError,
    DataError,
    DimensionMismatch,
    EmptyInitial,
    SolverError,
    bayes_error,
    expand_polynomial,
    fit_l1_svm,
    fit_l2_svm,
    fit_l2_svm_svd_reduced,
    fit_structured,
    generate_example,
    predict_json,
    solve_lp,
    spline_basis,
    train_json,
)
from . import _core

__version__ = "0.3.0"


def run_benchmark(config):
    """Run a simulation study; `config` is a dict, the report comes back as a dict."""
    return json.loads(_core.run_benchmark_json(json.dumps(config)))


def train(x, y, method, lam=None, big_m=None, cv=0, seed=1):
    """Fit a model and return its artifact as a dict."""
    return json.loads(train_json(x, y, method, lam, big_m, cv, seed))


def predict(model, x):
    """Labels in {+1, -1} from an artifact dict."""
    return predict_json(json.dumps(model), x)
