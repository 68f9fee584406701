"""Model-comparison protocol: per-series RMSE, naive baseline, rank tests.

The comparison fits each configured method on the training sites, rebuilds
every test year recursively, scores it with RMSE over all 37 periods, and
summarizes with a Friedman/Nemenyi rank analysis.  The initialization
study re-runs reconstruction with both initializations against one shared
fit per method.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import N_PERIODS
from .engine import DisaggConfig, disaggregate, fit_config, initial_values
from .errors import (
    ConfigError,
    EmptyDataset,
    GrassDisaggError,
    InvariantViolation,
    LengthMismatch,
    ShapeError,
)

# Two-tailed Nemenyi critical values (studentized range / sqrt(2), infinite
# degrees of freedom), indexed by the number of compared methods.
NEMENYI_Q = {
    0.05: {
        2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031,
        9: 3.102, 10: 3.164, 11: 3.219, 12: 3.268, 13: 3.313, 14: 3.354,
        15: 3.391, 16: 3.426, 17: 3.458, 18: 3.489, 19: 3.517, 20: 3.544,
    },
    0.10: {
        2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693, 8: 2.780,
        9: 2.855, 10: 2.920, 11: 2.978, 12: 3.030, 13: 3.077, 14: 3.120,
        15: 3.159, 16: 3.196, 17: 3.230, 18: 3.261, 19: 3.291, 20: 3.319,
    },
}

NAIVE_LABEL = "naive"


def rmse(truth, pred):
    """Root mean square error over all periods, initialization included."""
    truth = np.asarray(truth, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if truth.shape != pred.shape:
        raise LengthMismatch(f"series lengths differ: {truth.shape} vs {pred.shape}")
    diff = truth - pred
    return float(np.sqrt(np.mean(diff * diff)))


def naive_baseline(train):
    """Per-period mean growth over the training records."""
    if len(train) == 0:
        raise EmptyDataset("naive baseline needs at least one training record")
    stack = np.stack([rec.growth for rec in train.records])
    return stack.mean(axis=0)


@dataclass
class SeriesScore:
    site_id: str
    year: int
    method: str
    rmse: float
    negativity: bool


@dataclass
class AggregateStats:
    count: int
    mean: float
    std: float
    median: float
    q1: float
    q3: float
    min: float
    max: float

    @classmethod
    def from_values(cls, values):
        v = np.asarray(values, dtype=float)
        return cls(
            count=int(v.size),
            mean=float(v.mean()),
            std=float(v.std()),
            median=float(np.median(v)),
            q1=float(np.quantile(v, 0.25)),
            q3=float(np.quantile(v, 0.75)),
            min=float(v.min()),
            max=float(v.max()),
        )


@dataclass
class NemenyiResult:
    methods: list
    mean_ranks: np.ndarray
    critical_difference: float
    significant: np.ndarray  # (K, K) bool
    friedman_statistic: float
    alpha: float


@dataclass
class EvalReport:
    methods: list                    # method labels in run order
    rows: list                       # SeriesScore, grouped by method
    aggregates: dict                 # label -> AggregateStats
    nemenyi: NemenyiResult | None
    notes: dict = field(default_factory=dict)  # label -> failure note

    def rmse_matrix(self, methods=None):
        """(n_series, n_methods) matrix in (site, year) order of the rows."""
        methods = list(methods if methods is not None else self.methods)
        per_method = {m: [] for m in methods}
        for row in self.rows:
            if row.method in per_method:
                per_method[row.method].append(row.rmse)
        sizes = {m: len(v) for m, v in per_method.items()}
        if len(set(sizes.values())) != 1:
            raise ShapeError(f"methods cover different series counts: {sizes}")
        return np.column_stack([per_method[m] for m in methods])


def ranks_with_ties(values):
    """Ascending ranks starting at 1; tied values share the average rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def friedman_nemenyi(rmse_matrix, alpha=0.05):
    """Mean ranks, critical difference, and the pairwise significance matrix.

    Ranks are per series (1 = lowest error, ties averaged); two methods
    differ significantly when their mean ranks are more than CD apart,
    CD = q_alpha(K) * sqrt(K (K + 1) / (6 N)).
    """
    M = np.asarray(rmse_matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] < 2 or M.shape[1] < 2:
        raise ShapeError(f"need a (series >= 2) x (methods >= 2) matrix, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ShapeError("rank analysis cannot handle absent cells")
    n, k = M.shape
    if alpha not in NEMENYI_Q:
        raise ConfigError(f"no critical-value table for alpha={alpha}")
    if k not in NEMENYI_Q[alpha]:
        raise ConfigError(f"critical-value table covers 2..20 methods, got {k}")

    ranks = np.vstack([ranks_with_ties(row) for row in M])
    mean_ranks = ranks.mean(axis=0)
    cd = NEMENYI_Q[alpha][k] * math.sqrt(k * (k + 1) / (6.0 * n))
    diff = np.abs(mean_ranks[:, None] - mean_ranks[None, :])
    significant = diff > cd
    np.fill_diagonal(significant, False)
    friedman = 12.0 * n / (k * (k + 1)) * (
        float((mean_ranks**2).sum()) - k * (k + 1) ** 2 / 4.0
    )
    return mean_ranks, cd, significant, friedman


def protocol_configs(seed=0, svr_sample_cap=2000, forest_sample_cap=5000,
                     initialization="average", postprocessing="none"):
    """The nine regressor x preprocessing combinations of the comparison."""
    configs = []
    for regressor, cap in (("linear", None), ("svr", svr_sample_cap),
                           ("forest", forest_sample_cap)):
        for preprocessing in ("raw", "diff", "cumul"):
            configs.append(DisaggConfig(
                regressor=regressor,
                preprocessing=preprocessing,
                initialization=initialization,
                postprocessing=postprocessing,
                sample_cap=cap,
                seed=seed,
            ).validate())
    return configs


def evaluate_fitted(regressor, test, cfg):
    """Score one fitted method on every test record, in record order."""
    label = cfg.label()
    rows = []
    for rec in test.records:
        init = initial_values(cfg, rec)
        result = disaggregate(regressor, rec.climate, rec.cumulative, cfg, init)
        rows.append(SeriesScore(
            site_id=rec.site_id,
            year=rec.year,
            method=label,
            rmse=rmse(rec.growth, result.reconstructed),
            negativity=result.negativity_flag,
        ))
    return rows


def _run_method(args):
    train, test, cfg = args
    try:
        regressor = fit_config(train, cfg)
        return cfg.label(), evaluate_fitted(regressor, test, cfg), None
    except GrassDisaggError as exc:
        return cfg.label(), [], f"{type(exc).__name__}: {exc}"


def evaluate_methods(train, test, configs, jobs=1, alpha=0.05):
    """Fit every config on train, score on test, add the naive baseline.

    A failing method is dropped with a note instead of aborting the run.
    """
    if len(train) == 0 or len(test) == 0:
        raise EmptyDataset("evaluation needs non-empty train and test sets")
    overlap = set(train.site_index) & set(test.site_index)
    if overlap:
        raise InvariantViolation(f"train/test share sites: {sorted(overlap)[:5]}")
    labels = [cfg.label() for cfg in configs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"method labels must be unique, got {labels}")

    tasks = [(train, test, cfg) for cfg in configs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_method, tasks))
    else:
        outcomes = [_run_method(t) for t in tasks]

    rows = []
    notes = {}
    methods = []
    for label, method_rows, note in outcomes:
        if note is not None:
            notes[label] = note
            continue
        methods.append(label)
        rows.extend(method_rows)

    baseline = naive_baseline(train)
    for rec in test.records:
        rows.append(SeriesScore(
            site_id=rec.site_id,
            year=rec.year,
            method=NAIVE_LABEL,
            rmse=rmse(rec.growth, baseline),
            negativity=bool(np.any(baseline < 0)),
        ))
    methods.append(NAIVE_LABEL)

    aggregates = {}
    for method in methods:
        values = [r.rmse for r in rows if r.method == method]
        aggregates[method] = AggregateStats.from_values(values)

    nemenyi = None
    if len(methods) >= 2 and len(test) >= 2:
        report_stub = EvalReport(methods, rows, {}, None)
        matrix = report_stub.rmse_matrix(methods)
        mean_ranks, cd, significant, friedman = friedman_nemenyi(matrix, alpha=alpha)
        nemenyi = NemenyiResult(
            methods=list(methods),
            mean_ranks=mean_ranks,
            critical_difference=cd,
            significant=significant,
            friedman_statistic=friedman,
            alpha=alpha,
        )
    return EvalReport(methods=methods, rows=rows, aggregates=aggregates,
                      nemenyi=nemenyi, notes=notes)


@dataclass
class RatioRow:
    site_id: str
    year: int
    method: str
    rmse_concrete: float
    rmse_average: float
    ratio: float | None  # None when the concrete run is (near) exact


@dataclass
class RatioStudy:
    rows: list
    summaries: dict  # label -> dict of distribution stats


def init_ratio_study(train, test, configs):
    """RMSE(average init) / RMSE(concrete init), one shared fit per method."""
    if len(train) == 0 or len(test) == 0:
        raise EmptyDataset("the initialization study needs non-empty train and test sets")
    rows = []
    summaries = {}
    for cfg in configs:
        regressor = fit_config(train, cfg)
        label = cfg.label()
        cfg_concrete = cfg.with_overrides(initialization="concrete")
        cfg_average = cfg.with_overrides(initialization="average")
        ratios = []
        absent = 0
        for rec in test.records:
            res_c = disaggregate(regressor, rec.climate, rec.cumulative, cfg_concrete,
                                 initial_values(cfg_concrete, rec))
            res_a = disaggregate(regressor, rec.climate, rec.cumulative, cfg_average,
                                 initial_values(cfg_average, rec))
            r_c = rmse(rec.growth, res_c.reconstructed)
            r_a = rmse(rec.growth, res_a.reconstructed)
            if r_c < 1e-12:
                ratio = None
                absent += 1
            else:
                ratio = r_a / r_c
                ratios.append(ratio)
            rows.append(RatioRow(rec.site_id, rec.year, label, r_c, r_a, ratio))
        stats = {"count": len(ratios), "absent": absent}
        if ratios:
            v = np.asarray(ratios)
            stats.update(
                median=float(np.median(v)),
                mean=float(v.mean()),
                q1=float(np.quantile(v, 0.25)),
                q3=float(np.quantile(v, 0.75)),
                below_one=int((v < 1.0).sum()),
            )
        summaries[label] = stats
    return RatioStudy(rows=rows, summaries=summaries)
