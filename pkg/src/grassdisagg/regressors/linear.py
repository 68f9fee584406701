"""Linear least-squares regression."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError


@dataclass
class LinearModel:
    """Bias + weights fitted by least squares on standardized features.

    ``degenerate`` marks inputs that forced a bias-only fallback (too few
    rows, or constant targets).
    """

    bias: float
    weights: np.ndarray
    degenerate: bool = field(default=False)


def fit_linear(X, y):
    """Minimum-norm least-squares fit of y = b + w.x.

    The solve goes through an SVD (numpy lstsq), which is orthogonal-
    decomposition based and returns the minimum-norm solution whenever the
    design matrix is rank deficient.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"bad training shapes {X.shape} / {y.shape}")
    m, d = X.shape
    if m < d + 1 or np.ptp(y) == 0.0:
        # Bias-only fallback keeps constant targets exact.
        bias = float(y[0]) if m and np.ptp(y) == 0.0 else float(y.mean()) if m else 0.0
        return LinearModel(bias=bias, weights=np.zeros(d), degenerate=True)
    design = np.concatenate([np.ones((m, 1)), X], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return LinearModel(bias=float(coef[0]), weights=coef[1:])


def predict_linear(model, X):
    X = np.asarray(X, dtype=float)
    return model.bias + X @ model.weights
