"""Epsilon-insensitive support vector regression with a Gaussian kernel.

The dual is solved by sequential pairwise optimization on the doubled
variable vector a = [alpha; alpha*]:

    minimize  0.5 * (alpha - alpha*)' K (alpha - alpha*)
              + eps * sum(alpha + alpha*) - y' (alpha - alpha*)
    s.t.      sum(alpha - alpha*) = 0,   0 <= alpha, alpha* <= C

Each step picks the maximal violating pair, moves the two variables along
the equality constraint, and stops once the KKT gap drops under ``tol``.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInput

KKT_TOL = 1e-3
CURVATURE_FLOOR = 1e-12
SV_COEF_CUTOFF = 1e-12


@dataclass
class SvrModel:
    support_vectors: np.ndarray  # (n_sv, d) standardized feature rows
    coef: np.ndarray             # alpha - alpha* for each support vector
    bias: float
    gamma: float
    box: float
    epsilon: float
    converged: bool = field(default=True)
    dual_objective: float = field(default=0.0)


def rbf_kernel(A, B, gamma):
    """exp(-gamma * ||a - b||^2) for all row pairs."""
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def fit_svr(X, y, box=100.0, epsilon=0.1, gamma=None, tol=KKT_TOL, stall_limit=None,
            max_iter=None):
    """Train on standardized features/targets.

    ``stall_limit`` bounds pair updates without gap improvement (default
    10 * n_rows); hitting it returns the best iterate with converged=False.
    ``max_iter`` is an absolute safety cap on pair updates.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m = X.shape[0]
    if m < 2:
        raise DegenerateInput(f"SVR needs at least 2 rows, got {m}")
    if box <= 0 or epsilon < 0:
        raise DegenerateInput(f"need box > 0 and epsilon >= 0, got {box}, {epsilon}")
    d = X.shape[1]
    if gamma is None:
        gamma = 1.0 / d
    if gamma <= 0:
        raise DegenerateInput(f"gamma must be positive, got {gamma}")
    if stall_limit is None:
        stall_limit = 10 * m
    if max_iter is None:
        max_iter = max(200_000, 100 * m)

    K = rbf_kernel(X, X, gamma)
    diag = np.diagonal(K)

    # Expanded variables: first block alpha (sign +1), second block alpha* (sign -1).
    a = np.zeros(2 * m)
    p = np.concatenate([epsilon - y, epsilon + y])
    u = np.zeros(m)  # K @ (alpha - alpha*)

    converged = False
    best_gap = np.inf
    stalled = 0
    m_up = m_low = 0.0

    for _ in range(max_iter):
        G = np.concatenate([u, -u]) + p
        viol = np.concatenate([-G[:m], G[m:]])  # -z * G

        can_up = np.concatenate([a[:m] < box, a[m:] > 0.0])
        can_low = np.concatenate([a[:m] > 0.0, a[m:] < box])
        if not can_up.any() or not can_low.any():
            converged = True
            break

        up_viol = np.where(can_up, viol, -np.inf)
        low_viol = np.where(can_low, viol, np.inf)
        i = int(np.argmax(up_viol))
        j = int(np.argmin(low_viol))
        m_up = up_viol[i]
        m_low = low_viol[j]
        gap = m_up - m_low
        if gap <= tol:
            converged = True
            break
        if gap < best_gap - 1e-12:
            best_gap = gap
            stalled = 0
        else:
            stalled += 1
            if stalled > stall_limit:
                break

        ii, jj = i % m, j % m
        zi = 1.0 if i < m else -1.0
        zj = 1.0 if j < m else -1.0
        s = zi * zj
        eta = diag[ii] + diag[jj] - 2.0 * K[ii, jj]
        eta = max(eta, CURVATURE_FLOOR)

        step = -(G[i] - s * G[j]) / eta
        # Feasible range from both box constraints.
        lo = -a[i]
        hi = box - a[i]
        if s > 0:
            lo = max(lo, a[j] - box)
            hi = min(hi, a[j])
        else:
            lo = max(lo, -a[j])
            hi = min(hi, box - a[j])
        step = min(max(step, lo), hi)
        if step == 0.0:
            stalled += 1
            if stalled > stall_limit:
                break
            continue

        a[i] += step
        a[j] -= s * step
        if ii != jj:
            u += (zi * step) * (K[:, ii] - K[:, jj])

    beta = a[:m] - a[m:]
    bias = float((m_up + m_low) / 2.0) if np.isfinite(m_up) and np.isfinite(m_low) else 0.0
    objective = float(0.5 * beta @ u + p @ a)

    keep = np.abs(beta) > SV_COEF_CUTOFF
    return SvrModel(
        support_vectors=X[keep].copy(),
        coef=beta[keep].copy(),
        bias=bias,
        gamma=gamma,
        box=box,
        epsilon=epsilon,
        converged=converged,
        dual_objective=objective,
    )


def predict_svr(model, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    k = rbf_kernel(X, model.support_vectors, model.gamma)
    return k @ model.coef + model.bias
