"""Independent brute-force solver for the epsilon-SVR dual.

Works on the net-coefficient form of the dual,

    min 0.5 b'Kb + eps * |b|_1 - y'b   s.t.  sum(b) = 0,  -C <= b <= C,

by dense projected (proximal) gradient descent: a plain gradient step on
the smooth part, then an exact prox step that soft-thresholds, clips to
the box and shifts onto the sum-zero hyperplane via bisection.  The
Gaussian Gram matrix of distinct points is positive definite, so the
iteration converges linearly.  Deliberately shares no code with the SMO
solver it cross-checks.
"""

import numpy as np


def gaussian_gram(X, gamma):
    X = np.asarray(X, dtype=float)
    sq = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-gamma * sq)


def _prox(v, thresh, box):
    """argmin_x 0.5||x - v||^2 + thresh*|x|_1 on {sum x = 0, |x_i| <= box}."""

    def candidate(mu):
        shifted = v - mu
        soft = np.sign(shifted) * np.maximum(np.abs(shifted) - thresh, 0.0)
        return np.clip(soft, -box, box)

    lo = -(np.abs(v).max() + thresh + box)
    hi = np.abs(v).max() + thresh + box
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        if candidate(mu).sum() > 0:
            lo = mu
        else:
            hi = mu
    return candidate(0.5 * (lo + hi))


def svr_dual_solve(X, y, box, epsilon, gamma, iters=200_000):
    """Returns (dual objective, net coefficients beta)."""
    y = np.asarray(y, dtype=float)
    K = gaussian_gram(X, gamma)
    step = 1.0 / np.linalg.eigvalsh(K).max()
    beta = np.zeros(len(y))
    for _ in range(iters):
        grad = K @ beta - y
        beta = _prox(beta - step * grad, step * epsilon, box)
    objective = 0.5 * beta @ (K @ beta) + epsilon * np.abs(beta).sum() - y @ beta
    return float(objective), beta
