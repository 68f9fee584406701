"""Recursive disaggregation of an annual total into a 37-step series.

Training rows are teacher-forced (ground-truth lags); reconstruction feeds
each prediction back as a lag input, inverts the series transform, and
optionally forces the sum to the known annual cumulative value.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import transforms
from .data import CLIMATE_FIELDS, N_CLIMATE, N_PERIODS
from .errors import ConfigError, MissingCumulative, PredictionNonFinite, ZeroSumScale
from .regressors import KINDS, train_regressor
from .seeding import derive_entropy

PREPROCESSINGS = transforms.MODES
POSTPROCESSINGS = ("none", "scale", "translate")
INITIALIZATIONS = ("concrete", "average")

REGRESSOR_LABELS = {"linear": "lm", "svr": "svr", "forest": "rf"}


@dataclass
class DisaggConfig:
    """Everything a reconstruction run depends on.

    Feature rows have width order_p + (order_p + 1) * 6: the lagged series
    values first, then the climate blocks for offsets 0..order_p, each in
    CLIMATE_FIELDS order.
    """

    order_p: int = 3
    preprocessing: str = "raw"
    regressor: str = "linear"
    initialization: str = "concrete"
    average_init_value: float = 9.0
    postprocessing: str = "none"
    seed: int = 0
    svr_box: float = 100.0
    svr_epsilon: float = 0.1
    svr_gamma: float | None = None
    n_trees: int = 100
    min_leaf: int = 5
    mtry: int | None = None
    sample_cap: int | None = None
    name: str | None = None

    def validate(self):
        if not 1 <= self.order_p <= N_PERIODS - 1:
            raise ConfigError(f"order_p must lie in 1..{N_PERIODS - 1}, got {self.order_p}")
        if self.preprocessing not in PREPROCESSINGS:
            raise ConfigError(f"unknown preprocessing {self.preprocessing!r}")
        if self.regressor not in KINDS:
            raise ConfigError(f"unknown regressor {self.regressor!r}")
        if self.initialization not in INITIALIZATIONS:
            raise ConfigError(f"unknown initialization {self.initialization!r}")
        if self.postprocessing not in POSTPROCESSINGS:
            raise ConfigError(f"unknown postprocessing {self.postprocessing!r}")
        if self.average_init_value < 0:
            raise ConfigError("average_init_value must be >= 0")
        return self

    @property
    def feature_width(self):
        return self.order_p + (self.order_p + 1) * N_CLIMATE

    def label(self):
        """Method name used in reports, e.g. svr-raw or lm-diff+scale."""
        if self.name:
            return self.name
        base = f"{REGRESSOR_LABELS[self.regressor]}-{self.preprocessing}"
        if self.postprocessing != "none":
            base += f"+{self.postprocessing}"
        return base

    def to_mapping(self):
        out = {}
        for f in fields(self):
            out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def from_mapping(cls, mapping):
        """Build from string-or-typed values (config files give strings)."""
        kwargs = {}
        known = {f.name: f for f in fields(cls)}
        for key, raw in mapping.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs).validate()

    def config_hash(self):
        text = json.dumps(self.to_mapping(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs).validate()


_INT_KEYS = {"order_p", "seed", "n_trees", "min_leaf"}
_OPT_INT_KEYS = {"mtry", "sample_cap"}
_FLOAT_KEYS = {"average_init_value", "svr_box", "svr_epsilon"}
_OPT_FLOAT_KEYS = {"svr_gamma"}


def _coerce(key, raw):
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = raw.strip()
        if raw.lower() in ("none", ""):
            if key in _OPT_INT_KEYS | _OPT_FLOAT_KEYS | {"name"}:
                return None
            raise ConfigError(f"config key {key!r} cannot be empty")
        if key in _INT_KEYS | _OPT_INT_KEYS:
            try:
                return int(raw)
            except ValueError:
                raise ConfigError(f"config key {key!r} needs an integer, got {raw!r}") from None
        if key in _FLOAT_KEYS | _OPT_FLOAT_KEYS:
            try:
                return float(raw)
            except ValueError:
                raise ConfigError(f"config key {key!r} needs a number, got {raw!r}") from None
        return raw
    return raw


@dataclass
class DisaggResult:
    reconstructed: np.ndarray
    raw_prediction: np.ndarray
    negativity_flag: bool
    achieved_sum: float


def _climate_matrix(climate):
    if isinstance(climate, np.ndarray):
        Y = np.asarray(climate, dtype=float)
    else:
        Y = np.array([step.as_tuple() for step in climate], dtype=float)
    if Y.shape != (N_PERIODS, N_CLIMATE):
        raise ConfigError(
            f"climate must be {N_PERIODS} steps of {len(CLIMATE_FIELDS)} values, got {Y.shape}"
        )
    return Y


def _features_into(out, z, Y, t, p):
    """Row layout: [z_{t-1}..z_{t-p}, Y_t, Y_{t-1}, .., Y_{t-p}] flattened."""
    out[:p] = z[t - p:t][::-1]
    col = p
    for j in range(p + 1):
        out[col:col + N_CLIMATE] = Y[t - j]
        col += N_CLIMATE


def build_training_set(ds, cfg):
    """Teacher-forced supervised rows from every record, in record order."""
    cfg.validate()
    p = cfg.order_p
    d = cfg.feature_width
    n_rows_per_record = N_PERIODS - p
    X = np.empty((len(ds.records) * n_rows_per_record, d))
    y = np.empty(len(ds.records) * n_rows_per_record)
    at = 0
    for rec in ds.records:
        z = transforms.forward(cfg.preprocessing, rec.growth)
        Y = rec.climate_matrix()
        block = X[at:at + n_rows_per_record]
        for i in range(1, p + 1):
            block[:, i - 1] = z[p - i:N_PERIODS - i]
        col = p
        for j in range(p + 1):
            block[:, col:col + N_CLIMATE] = Y[p - j:N_PERIODS - j]
            col += N_CLIMATE
        y[at:at + n_rows_per_record] = z[p:]
        at += n_rows_per_record
    return X, y


def initial_values(cfg, record):
    """First p transformed values seeding the recursion.

    Concrete initialization transforms the record's own growth; average
    initialization assumes growth has been constant at average_init_value,
    so its differences are zero and its running sums are multiples.
    """
    cfg.validate()
    p = cfg.order_p
    if cfg.initialization == "concrete":
        return transforms.forward(cfg.preprocessing, record.growth)[:p]
    v = cfg.average_init_value
    if cfg.preprocessing == "raw":
        return np.full(p, v)
    if cfg.preprocessing == "diff":
        return np.zeros(p)
    return v * np.arange(1, p + 1, dtype=float)


def fit_config(ds, cfg):
    """Train the configured regressor on teacher-forced rows from ``ds``."""
    cfg.validate()
    X, y = build_training_set(ds, cfg)
    # Seed depends only on what training sees, so e.g. post-processing
    # variants of one model share the same fit.
    train_seed = derive_entropy(
        cfg.seed, "train", cfg.regressor, cfg.preprocessing, cfg.order_p
    ) % (2**63)
    return train_regressor(
        cfg.regressor,
        X,
        y,
        seed=train_seed,
        svr_box=cfg.svr_box,
        svr_epsilon=cfg.svr_epsilon,
        svr_gamma=cfg.svr_gamma,
        n_trees=cfg.n_trees,
        min_leaf=cfg.min_leaf,
        mtry=cfg.mtry,
        sample_cap=cfg.sample_cap,
    )


def disaggregate(regressor, climate, cumulative, cfg, init):
    """Reconstruct one year from climate (and optionally its annual total).

    Predictions are fed back as lag inputs; ground-truth growth is never
    read.  Negative values are flagged, never clamped.
    """
    cfg.validate()
    p = cfg.order_p
    init = np.asarray(init, dtype=float)
    if init.shape != (p,):
        raise ConfigError(f"init must hold {p} values, got shape {init.shape}")
    if cfg.postprocessing != "none" and cumulative is None:
        raise MissingCumulative(
            f"postprocessing {cfg.postprocessing!r} needs the annual cumulative value"
        )
    Y = _climate_matrix(climate)

    z = np.empty(N_PERIODS)
    z[:p] = init
    row = np.empty(cfg.feature_width)
    for t in range(p, N_PERIODS):
        _features_into(row, z, Y, t, p)
        pred = regressor.predict_row(row)
        if not math.isfinite(pred):
            raise PredictionNonFinite(f"model produced {pred} at period {t + 1}")
        z[t] = pred

    if cfg.preprocessing == "diff" and cumulative is not None:
        raw_pred = transforms.inverse_diff_with_total(z, cumulative)
    else:
        raw_pred = transforms.inverse(cfg.preprocessing, z)

    if cfg.postprocessing == "none":
        reconstructed = raw_pred.copy()
    else:
        reconstructed = postprocess(raw_pred, cumulative, cfg.postprocessing)

    return DisaggResult(
        reconstructed=reconstructed,
        raw_prediction=raw_pred,
        negativity_flag=bool(np.any(reconstructed < 0)),
        achieved_sum=float(reconstructed.sum()),
    )


def postprocess(xhat, total, kind):
    """Force the series sum to ``total`` by rescaling or uniform translation."""
    xhat = np.asarray(xhat, dtype=float)
    if kind not in ("scale", "translate"):
        raise ConfigError(f"unknown postprocessing {kind!r}")
    s = xhat.sum()
    if kind == "scale":
        if abs(s) <= 1e-9:
            raise ZeroSumScale(f"cannot rescale a series summing to {s}")
        return xhat * (total / s)
    return xhat + (total - s) / xhat.size
