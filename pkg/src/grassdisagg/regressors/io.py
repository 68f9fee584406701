"""Versioned JSON serialization for trained regressors.

Python's shortest-roundtrip float repr makes the text format bit-exact on
reload; the file also carries the run configuration used at training time
so reconstruction can be replayed without extra flags.
"""

import json

import numpy as np

from ..errors import IoError
from .forest import ForestModel, Tree
from .linear import LinearModel
from .scaling import Standardizer
from .svr import SvrModel

FORMAT_NAME = "grassdisagg-model"
FORMAT_VERSION = 1


def _scaler_to_json(scaler):
    if scaler is None:
        return None
    return {"mean": scaler.mean.tolist(), "scale": scaler.scale.tolist()}


def _scaler_from_json(blob):
    if blob is None:
        return None
    return Standardizer(mean=np.asarray(blob["mean"]), scale=np.asarray(blob["scale"]))


def _model_to_json(kind, model):
    if kind == "linear":
        return {
            "bias": model.bias,
            "weights": model.weights.tolist(),
            "degenerate": model.degenerate,
        }
    if kind == "svr":
        return {
            "support_vectors": model.support_vectors.tolist(),
            "coef": model.coef.tolist(),
            "bias": model.bias,
            "gamma": model.gamma,
            "box": model.box,
            "epsilon": model.epsilon,
            "converged": model.converged,
            "dual_objective": model.dual_objective,
        }
    if kind == "forest":
        return {
            "n_features": model.n_features,
            "seed": model.seed,
            "min_leaf": model.min_leaf,
            "mtry": model.mtry,
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "value": t.value.tolist(),
                }
                for t in model.trees
            ],
        }
    raise IoError(f"unknown model kind {kind!r}")


def _model_from_json(kind, blob):
    if kind == "linear":
        return LinearModel(
            bias=blob["bias"],
            weights=np.asarray(blob["weights"], dtype=float),
            degenerate=blob["degenerate"],
        )
    if kind == "svr":
        return SvrModel(
            support_vectors=np.asarray(blob["support_vectors"], dtype=float).reshape(
                len(blob["coef"]), -1
            )
            if blob["coef"]
            else np.zeros((0, 0)),
            coef=np.asarray(blob["coef"], dtype=float),
            bias=blob["bias"],
            gamma=blob["gamma"],
            box=blob["box"],
            epsilon=blob["epsilon"],
            converged=blob["converged"],
            dual_objective=blob["dual_objective"],
        )
    if kind == "forest":
        trees = [
            Tree(
                feature=np.asarray(t["feature"], dtype=np.int32),
                threshold=np.asarray(t["threshold"], dtype=float),
                left=np.asarray(t["left"], dtype=np.int32),
                right=np.asarray(t["right"], dtype=np.int32),
                value=np.asarray(t["value"], dtype=float),
            )
            for t in blob["trees"]
        ]
        return ForestModel(
            trees=trees,
            n_features=blob["n_features"],
            seed=blob["seed"],
            min_leaf=blob["min_leaf"],
            mtry=blob["mtry"],
        )
    raise IoError(f"unknown model kind {kind!r}")


def save_regressor(reg, path, config=None):
    """Write a Regressor to ``path``; ``config`` (a mapping) rides along."""
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": reg.kind,
        "feature_scaler": _scaler_to_json(reg.feature_scaler),
        "target_scaler": _scaler_to_json(reg.target_scaler),
        "model": _model_to_json(reg.kind, reg.model),
        "config": dict(config) if config is not None else None,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, allow_nan=False)
            fh.write("\n")
    except (OSError, ValueError) as exc:
        raise IoError(f"cannot write model file {path}: {exc}") from None


def load_regressor(path):
    """Read back a (Regressor, config-dict-or-None) pair."""
    from . import Regressor  # local import to avoid a cycle

    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read model file {path}: {exc}") from None
    if payload.get("format") != FORMAT_NAME:
        raise IoError(f"{path} is not a {FORMAT_NAME} file")
    if payload.get("version") != FORMAT_VERSION:
        raise IoError(f"unsupported model file version {payload.get('version')}")
    reg = Regressor(
        kind=payload["kind"],
        feature_scaler=_scaler_from_json(payload["feature_scaler"]),
        target_scaler=_scaler_from_json(payload["target_scaler"]),
        model=_model_from_json(payload["kind"], payload["model"]),
    )
    return reg, payload.get("config")
