"""Random-forest regression: bagged CART trees with axis-aligned splits.

Every tree owns a generator derived from (seed, tree index), so fits are
reproducible bit for bit no matter how trees are scheduled.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInput
from ..seeding import child_rng


@dataclass
class Tree:
    """Flat array representation; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


@dataclass
class ForestModel:
    trees: list
    n_features: int
    seed: int = field(default=0)
    min_leaf: int = field(default=5)
    mtry: int = field(default=0)


def _best_split(X, y, idx, features, min_leaf):
    """Smallest within-node SSE split over the candidate features, or None."""
    ys = y[idx]
    n = idx.size
    best = None  # (sse, feature, threshold)
    counts = np.arange(min_leaf, n - min_leaf + 1, dtype=float)
    for f in features:
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        ys_sorted = ys[order]
        csum = np.cumsum(ys_sorted)
        csq = np.cumsum(ys_sorted * ys_sorted)
        k = np.arange(min_leaf, n - min_leaf + 1)
        boundary_ok = xs_sorted[k - 1] < xs_sorted[k]
        if not boundary_ok.any():
            continue
        left_sum = csum[k - 1]
        left_sq = csq[k - 1]
        right_sum = csum[-1] - left_sum
        right_sq = csq[-1] - left_sq
        sse = (left_sq - left_sum * left_sum / counts) + (
            right_sq - right_sum * right_sum / (n - counts)
        )
        sse = np.where(boundary_ok, sse, np.inf)
        pos = int(np.argmin(sse))
        if best is None or sse[pos] < best[0]:
            thr = 0.5 * (xs_sorted[k[pos] - 1] + xs_sorted[k[pos]])
            best = (float(sse[pos]), int(f), thr)
    return best


def _leaf_value(ys):
    # Pure leaves keep the exact target value.
    if ys.min() == ys.max():
        return float(ys[0])
    return float(ys.mean())


def _grow_tree(X, y, min_leaf, mtry, rng):
    d = X.shape[1]
    feature = []
    threshold = []
    left = []
    right = []
    value = []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(np.arange(X.shape[0]), root)]
    while stack:
        idx, node = stack.pop()
        ys = y[idx]
        if idx.size < 2 * min_leaf or ys.min() == ys.max():
            value[node] = _leaf_value(ys)
            continue
        if mtry < d:
            feats = rng.choice(d, size=mtry, replace=False)
        else:
            feats = np.arange(d)
        best = _best_split(X, y, idx, feats, min_leaf)
        if best is None:
            value[node] = _leaf_value(ys)
            continue
        _, f, thr = best
        mask = X[idx, f] <= thr
        left_id = new_node()
        right_id = new_node()
        feature[node] = f
        threshold[node] = thr
        left[node] = left_id
        right[node] = right_id
        stack.append((idx[~mask], right_id))
        stack.append((idx[mask], left_id))
    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=float),
    )


def fit_forest(X, y, n_trees=100, min_leaf=5, mtry=None, seed=0):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    m, d = X.shape
    if m < 2 * min_leaf:
        raise DegenerateInput(f"forest needs at least {2 * min_leaf} rows, got {m}")
    if n_trees < 1 or min_leaf < 1:
        raise DegenerateInput("n_trees and min_leaf must be positive")
    if mtry is None:
        mtry = math.ceil(d / 3)
    mtry = max(1, min(mtry, d))

    trees = []
    for t in range(n_trees):
        rng = child_rng(seed, "tree", t)
        sample = rng.integers(0, m, size=m)
        trees.append(_grow_tree(X[sample], y[sample], min_leaf, mtry, rng))
    return ForestModel(trees=trees, n_features=d, seed=seed, min_leaf=min_leaf, mtry=mtry)


def _tree_predict(tree, X):
    idx = np.zeros(X.shape[0], dtype=np.intp)
    while True:
        feat = tree.feature[idx]
        active = np.nonzero(feat >= 0)[0]
        if active.size == 0:
            break
        nodes = idx[active]
        go_left = X[active, tree.feature[nodes]] <= tree.threshold[nodes]
        idx[active] = np.where(go_left, tree.left[nodes], tree.right[nodes])
    return tree.value[idx]


def predict_forest(model, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    preds = np.stack([_tree_predict(tree, X) for tree in model.trees])
    out = preds.mean(axis=0)
    # When every tree agrees, return the shared value untouched: float
    # averaging of identical numbers is not always exact.
    same = preds.min(axis=0) == preds.max(axis=0)
    if same.any():
        out[same] = preds[0, same]
    return out
