"""Regression learners sharing one fit/predict contract.

``fit_linear``/``fit_svr``/``fit_forest`` work in standardized space; the
``Regressor`` wrapper owns the standardizers and is what the rest of the
package passes around.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, WidthMismatch
from ..seeding import child_rng
from .forest import ForestModel, fit_forest, predict_forest
from .linear import LinearModel, fit_linear, predict_linear
from .scaling import Standardizer
from .svr import SvrModel, fit_svr, predict_svr
from .io import load_regressor, save_regressor

KINDS = ("linear", "svr", "forest")

__all__ = [
    "KINDS",
    "ForestModel",
    "LinearModel",
    "Regressor",
    "Standardizer",
    "SvrModel",
    "fit_forest",
    "fit_linear",
    "fit_svr",
    "load_regressor",
    "predict",
    "predict_forest",
    "predict_linear",
    "predict_svr",
    "save_regressor",
    "train_regressor",
]


def predict(model, x):
    """Scalar prediction from a fitted core model on one standardized row."""
    x = np.asarray(x, dtype=float)
    width = model.weights.shape[0] if isinstance(model, LinearModel) else None
    if isinstance(model, SvrModel) and model.support_vectors.size:
        width = model.support_vectors.shape[1]
    if isinstance(model, ForestModel):
        width = model.n_features
    if width is not None and x.shape[-1] != width:
        raise WidthMismatch(f"expected {width} features, got {x.shape[-1]}")
    if isinstance(model, LinearModel):
        return float(predict_linear(model, x))
    if isinstance(model, SvrModel):
        return float(predict_svr(model, x)[0])
    if isinstance(model, ForestModel):
        return float(predict_forest(model, x)[0])
    raise TypeError(f"not a fitted model: {type(model)!r}")


@dataclass
class Regressor:
    """A fitted model plus the scalers its features/targets were fitted with."""

    kind: str
    feature_scaler: Standardizer
    target_scaler: Standardizer | None
    model: object

    @property
    def n_features(self):
        return self.feature_scaler.mean.shape[0]

    def predict_row(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise WidthMismatch(f"expected {self.n_features} features, got {x.shape}")
        z = predict(self.model, self.feature_scaler.transform(x))
        if self.target_scaler is not None:
            z = z * self.target_scaler.scale[0] + self.target_scaler.mean[0]
        return float(z)

    def predict_matrix(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise WidthMismatch(f"expected (n, {self.n_features}) matrix, got {X.shape}")
        Xs = self.feature_scaler.transform(X)
        if self.kind == "linear":
            z = predict_linear(self.model, Xs)
        elif self.kind == "svr":
            z = predict_svr(self.model, Xs)
        else:
            z = predict_forest(self.model, Xs)
        if self.target_scaler is not None:
            z = z * self.target_scaler.scale[0] + self.target_scaler.mean[0]
        return z

    def linear_coefficients(self):
        """(bias, weights) mapped back to original feature units."""
        if self.kind != "linear":
            raise ConfigError("only linear models expose plain coefficients")
        w_std = self.model.weights
        mu = self.feature_scaler.mean
        sigma = self.feature_scaler.scale
        weights = w_std / sigma
        bias = self.model.bias - float((w_std * mu / sigma).sum())
        return bias, weights


def train_regressor(kind, X, y, *, seed=0, svr_box=100.0, svr_epsilon=0.1,
                    svr_gamma=None, n_trees=100, min_leaf=5, mtry=None,
                    sample_cap=None):
    """Standardize, optionally subsample (svr/forest only), fit, and wrap."""
    if kind not in KINDS:
        raise ConfigError(f"unknown regressor kind {kind!r}, expected one of {KINDS}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ConfigError("training data must be finite")

    if kind != "linear" and sample_cap is not None and sample_cap < X.shape[0]:
        rng = child_rng(seed, "sample")
        keep = np.sort(rng.choice(X.shape[0], size=sample_cap, replace=False))
        X = X[keep]
        y = y[keep]

    feature_scaler = Standardizer.fit(X)
    Xs = feature_scaler.transform(X)

    if kind == "linear":
        return Regressor("linear", feature_scaler, None, fit_linear(Xs, y))
    if kind == "svr":
        target_scaler = Standardizer.fit(y)
        ys = (y - target_scaler.mean[0]) / target_scaler.scale[0]
        model = fit_svr(Xs, ys, box=svr_box, epsilon=svr_epsilon, gamma=svr_gamma)
        return Regressor("svr", feature_scaler, target_scaler, model)
    if mtry is None:
        mtry = math.ceil(X.shape[1] / 3)
    model = fit_forest(Xs, y, n_trees=n_trees, min_leaf=min_leaf, mtry=mtry,
                       seed=seed)
    return Regressor("forest", feature_scaler, None, model)
