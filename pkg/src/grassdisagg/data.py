"""Dataset schema, CSV ingestion and the climate-site train/test split.

One CSV row per (site, year, period); 37 ten-day periods per year.  Growth
is a decade-average daily value (kg DM/ha/d) and the annual cumulative is
the plain sum of the 37 decade means.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    ImMismatch,
    InvariantViolation,
    IoError,
    LengthError,
    MissingPeriod,
    NonNumeric,
    SchemaError,
    TooFewSites,
)

N_PERIODS = 37

# Column order of the climate block everywhere a record is turned into a matrix.
CLIMATE_FIELDS = ("t_min", "t_max", "t_avg", "rain", "rg", "im")
N_CLIMATE = len(CLIMATE_FIELDS)

# Canonical CSV header, one row per (site, year, period).
CSV_COLUMNS = ("id", "year", "period", "Tmin", "Tmax", "Tavg", "Rain", "RG", "im", "growth")

MARTONNE_FACTOR = 37.0


def martonne_index(rain, t_avg):
    """Aridity index 37 * rain / (t_avg + 10), in mm/degC."""
    if t_avg <= -10.0:
        raise DomainError(f"t_avg must exceed -10 degC, got {t_avg}")
    return MARTONNE_FACTOR * rain / (t_avg + 10.0)


def annual_cumulative(growth):
    """Left-to-right sum of the 37 decade-average growth values."""
    if len(growth) != N_PERIODS:
        raise LengthError(f"expected {N_PERIODS} growth values, got {len(growth)}")
    total = 0.0
    for v in growth:
        total += float(v)
    return total


@dataclass(frozen=True)
class ClimateStep:
    """Climate aggregates for one ten-day period."""

    t_min: float
    t_max: float
    t_avg: float
    rain: float
    rg: float
    im: float

    def validate(self, where=""):
        ctx = f" ({where})" if where else ""
        if not all(math.isfinite(getattr(self, f)) for f in CLIMATE_FIELDS):
            raise InvariantViolation(f"non-finite climate value{ctx}")
        if not (self.t_min <= self.t_avg <= self.t_max):
            raise InvariantViolation(
                f"temperature ordering violated: {self.t_min} <= {self.t_avg} <= {self.t_max} fails{ctx}"
            )
        if self.rain < 0:
            raise InvariantViolation(f"negative rainfall {self.rain}{ctx}")
        if self.rg < 0:
            raise InvariantViolation(f"negative radiation {self.rg}{ctx}")
        if self.t_avg <= -10.0:
            raise InvariantViolation(f"t_avg {self.t_avg} <= -10 degC{ctx}")

    def as_tuple(self):
        return (self.t_min, self.t_max, self.t_avg, self.rain, self.rg, self.im)


@dataclass
class AnnualRecord:
    """One (site, year): 37 growth values, 37 climate steps and their sum."""

    site_id: str
    year: int
    growth: np.ndarray
    climate: tuple
    cumulative: float

    def validate(self):
        where = f"site {self.site_id}, year {self.year}"
        if len(self.growth) != N_PERIODS or len(self.climate) != N_PERIODS:
            raise InvariantViolation(f"{where}: record must hold exactly {N_PERIODS} periods")
        if not np.all(np.isfinite(self.growth)):
            raise InvariantViolation(f"{where}: non-finite growth value")
        if np.any(self.growth < 0):
            raise InvariantViolation(f"{where}: negative growth value")
        for t, step in enumerate(self.climate):
            step.validate(where=f"{where}, period {t + 1}")
        total = annual_cumulative(self.growth)
        if abs(self.cumulative - total) > 1e-9 * max(1.0, abs(self.cumulative)):
            raise InvariantViolation(
                f"{where}: cumulative {self.cumulative} does not match growth sum {total}"
            )

    def climate_matrix(self):
        """(37, 6) array of the climate steps in CLIMATE_FIELDS order."""
        return np.array([step.as_tuple() for step in self.climate], dtype=float)


@dataclass
class Dataset:
    """Immutable-by-convention collection of annual records with a site index."""

    records: list
    site_index: dict = field(default_factory=dict)

    @classmethod
    def from_records(cls, records):
        index = {}
        seen = set()
        for pos, rec in enumerate(records):
            key = (rec.site_id, rec.year)
            if key in seen:
                raise InvariantViolation(f"duplicate (site, year) pair {key}")
            seen.add(key)
            index.setdefault(rec.site_id, []).append(pos)
        return cls(records=list(records), site_index=index)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def sites(self):
        return list(self.site_index)

    def subset_by_sites(self, site_ids):
        keep = set(site_ids)
        return Dataset.from_records([r for r in self.records if r.site_id in keep])


def _parse_float(text, column, line_num):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise NonNumeric(f"row {line_num}: cannot parse {column}={text!r} as a number") from None
    if not math.isfinite(value):
        raise NonNumeric(f"row {line_num}: non-finite value {text!r} in column {column}")
    return value


def _parse_int(text, column, line_num):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise NonNumeric(f"row {line_num}: cannot parse {column}={text!r} as an integer") from None


def load_dataset(path, schema=None):
    """Read a dataset CSV into grouped, validated annual records.

    ``schema`` optionally maps canonical column names (CSV_COLUMNS) to the
    names used in the file; omitting "im" from the map skips the
    aridity-index cross-check (the index is always recomputed either way).
    """
    colmap = dict(zip(CSV_COLUMNS, CSV_COLUMNS))
    if schema is not None:
        colmap.update(schema)
    has_im = colmap.get("im") is not None

    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from None

    groups = {}  # (site, year) -> {period: row-dict}
    order = []
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        required = [colmap[c] for c in CSV_COLUMNS if c != "im" or has_im]
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: header is missing columns {missing}")

        for row in reader:
            line = reader.line_num
            site = row[colmap["id"]]
            year = _parse_int(row[colmap["year"]], "year", line)
            period = _parse_int(row[colmap["period"]], "period", line)
            if not 1 <= period <= N_PERIODS:
                raise InvariantViolation(
                    f"row {line}: period {period} outside 1..{N_PERIODS}"
                )
            key = (site, year)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            if period in groups[key]:
                raise InvariantViolation(
                    f"row {line}: duplicate period {period} for site {site}, year {year}"
                )
            parsed = {"line": line}
            for canon, col in (("Tmin", "t_min"), ("Tmax", "t_max"), ("Tavg", "t_avg"),
                               ("Rain", "rain"), ("RG", "rg"), ("growth", "growth")):
                parsed[col] = _parse_float(row[colmap[canon]], colmap[canon], line)
            if has_im:
                parsed["im_file"] = _parse_float(row[colmap["im"]], colmap["im"], line)
            groups[key][period] = parsed

    records = []
    for site, year in order:
        rows = groups[(site, year)]
        for period in range(1, N_PERIODS + 1):
            if period not in rows:
                raise MissingPeriod(f"site {site}, year {year}: period {period} is missing")
        growth = np.empty(N_PERIODS)
        steps = []
        for period in range(1, N_PERIODS + 1):
            r = rows[period]
            if r["t_avg"] <= -10.0:
                raise InvariantViolation(
                    f"row {r['line']}: t_avg {r['t_avg']} <= -10 degC"
                )
            im = martonne_index(r["rain"], r["t_avg"])
            if has_im:
                if abs(r["im_file"] - im) > 1e-6 * max(1.0, abs(im)):
                    raise ImMismatch(
                        f"row {r['line']}: im column {r['im_file']} deviates from "
                        f"recomputed value {im}"
                    )
            step = ClimateStep(r["t_min"], r["t_max"], r["t_avg"], r["rain"], r["rg"], im)
            step.validate(where=f"row {r['line']}")
            if r["growth"] < 0:
                raise InvariantViolation(f"row {r['line']}: negative growth {r['growth']}")
            growth[period - 1] = r["growth"]
            steps.append(step)
        record = AnnualRecord(
            site_id=site,
            year=year,
            growth=growth,
            climate=tuple(steps),
            cumulative=annual_cumulative(growth),
        )
        record.validate()
        records.append(record)
    return Dataset.from_records(records)


@dataclass
class ClimateYear:
    """Input for reconstruction: climate known, growth optional truth."""

    site_id: str
    year: int
    climate: tuple
    growth: np.ndarray | None = None


def load_climate(path, schema=None):
    """Read climate series for reconstruction; the growth column is optional.

    Accepts the full dataset schema (growth kept as ground truth) or the
    same file without a growth column / with empty growth cells.
    """
    colmap = dict(zip(CSV_COLUMNS, CSV_COLUMNS))
    if schema is not None:
        colmap.update(schema)

    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from None

    groups = {}
    order = []
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        has_growth = colmap.get("growth") in header
        has_im = colmap.get("im") in header
        required = [colmap[c] for c in ("id", "year", "period", "Tmin", "Tmax", "Tavg", "Rain", "RG")]
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: header is missing columns {missing}")

        for row in reader:
            line = reader.line_num
            site = row[colmap["id"]]
            year = _parse_int(row[colmap["year"]], "year", line)
            period = _parse_int(row[colmap["period"]], "period", line)
            if not 1 <= period <= N_PERIODS:
                raise InvariantViolation(f"row {line}: period {period} outside 1..{N_PERIODS}")
            key = (site, year)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            if period in groups[key]:
                raise InvariantViolation(
                    f"row {line}: duplicate period {period} for site {site}, year {year}"
                )
            parsed = {"line": line}
            for canon, col in (("Tmin", "t_min"), ("Tmax", "t_max"), ("Tavg", "t_avg"),
                               ("Rain", "rain"), ("RG", "rg")):
                parsed[col] = _parse_float(row[colmap[canon]], colmap[canon], line)
            growth_cell = row.get(colmap["growth"], "") if has_growth else ""
            parsed["growth"] = (
                _parse_float(growth_cell, colmap["growth"], line) if growth_cell.strip() else None
            )
            if has_im and row[colmap["im"]].strip():
                parsed["im_file"] = _parse_float(row[colmap["im"]], colmap["im"], line)
            groups[key][period] = parsed

    series = []
    for site, year in order:
        rows = groups[(site, year)]
        for period in range(1, N_PERIODS + 1):
            if period not in rows:
                raise MissingPeriod(f"site {site}, year {year}: period {period} is missing")
        steps = []
        growth_vals = []
        for period in range(1, N_PERIODS + 1):
            r = rows[period]
            if r["t_avg"] <= -10.0:
                raise InvariantViolation(f"row {r['line']}: t_avg {r['t_avg']} <= -10 degC")
            im = martonne_index(r["rain"], r["t_avg"])
            if "im_file" in r and abs(r["im_file"] - im) > 1e-6 * max(1.0, abs(im)):
                raise ImMismatch(
                    f"row {r['line']}: im column {r['im_file']} deviates from recomputed value {im}"
                )
            step = ClimateStep(r["t_min"], r["t_max"], r["t_avg"], r["rain"], r["rg"], im)
            step.validate(where=f"row {r['line']}")
            steps.append(step)
            growth_vals.append(r["growth"])
        known = [g for g in growth_vals if g is not None]
        if known and len(known) != N_PERIODS:
            raise InvariantViolation(
                f"site {site}, year {year}: growth must be fully present or fully absent"
            )
        growth = np.asarray(known) if known else None
        if growth is not None and np.any(growth < 0):
            raise InvariantViolation(f"site {site}, year {year}: negative growth value")
        series.append(ClimateYear(site_id=site, year=year, climate=tuple(steps), growth=growth))
    return series


def split_by_site(ds, test_fraction, seed):
    """Deterministically split records into (train, test) with site-disjoint partitions.

    Sites are shuffled by ``seed``; ceil(test_fraction * n_sites) of them go
    to the test side, and every record of a site follows its site.
    """
    sites = sorted(ds.site_index)
    if len(sites) < 2:
        raise TooFewSites(f"need at least 2 distinct sites, got {len(sites)}")
    if not 0.0 < test_fraction < 1.0:
        raise DomainError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(sites))
    n_test = math.ceil(test_fraction * len(sites))
    test_sites = {sites[i] for i in perm[:n_test]}
    train = Dataset.from_records([r for r in ds.records if r.site_id not in test_sites])
    test = Dataset.from_records([r for r in ds.records if r.site_id in test_sites])
    return train, test
