"""Synthetic pedoclimatic dataset generator.

Stands in for the unavailable simulation database: per-site seasonal
temperature/radiation curves, stochastic ten-day rainfall, and a growth
response combining temperature suitability, light saturation and a
soil-water reservoir.  The exact-linear mode instead drives growth with a
fixed autoregressive + climate law whose coefficients live below, which
gives fitting code a noiseless ground truth.

Every (site, year) pair draws from its own derived generator, so parallel
and sequential generation agree and any record can be regenerated alone.
"""

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .data import (
    AnnualRecord,
    CSV_COLUMNS,
    ClimateStep,
    Dataset,
    N_PERIODS,
    annual_cumulative,
    martonne_index,
)
from .errors import ConfigError, IoError
from .seeding import child_rng

DAYS_PER_YEAR = 365.0

# Coefficients of the exact-linear growth law (lag weights, then one
# 6-vector per climate offset 0..3 in CLIMATE_FIELDS order).  Weights sit
# on rain/rg/im only, which are non-negative, so growth stays non-negative.
EXACT_LINEAR_BIAS = 1.0
EXACT_LINEAR_PHI = (0.5, 0.25, 0.1)
EXACT_LINEAR_PSI = (
    (0.0, 0.0, 0.0, 0.02, 0.0002, 0.01),
    (0.0, 0.0, 0.0, 0.01, 0.0001, 0.005),
    (0.0, 0.0, 0.0, 0.005, 0.00005, 0.0025),
    (0.0, 0.0, 0.0, 0.0025, 0.000025, 0.00125),
)
EXACT_LINEAR_INIT = 9.0


@dataclass
class GenParams:
    """Knobs for one synthetic dataset."""

    n_sites: int = 200
    n_years: int = 5
    first_year: int = 2009
    seed: int = 42
    mode: str = "realistic"  # realistic | exact_linear

    # Site-to-site climate variation (uniform ranges).
    temp_mean_range: tuple = (9.0, 13.0)
    temp_amplitude_range: tuple = (5.5, 7.5)
    temp_coldest_day: float = 15.0
    temp_noise_sd: float = 0.6
    temp_spread_range: tuple = (3.0, 6.0)
    rg_mean: float = 12000.0
    rg_amplitude: float = 9250.0
    rg_noise_sd: float = 450.0
    rain_shape: float = 1.6
    wetness_range: tuple = (18.0, 38.0)
    summer_dryness_range: tuple = (0.2, 0.6)

    # Growth response.
    temp_optimum: float = 18.0
    temp_width: float = 12.5
    rg_half_saturation: float = 6000.0
    water_half_saturation: float = 28.0
    soil_carryover: float = 0.5
    growth_ceiling: float = 125.0
    ar_smoothing: float = 0.55
    noise_sd: float = 1.5

    def validate(self):
        if self.n_sites < 1 or self.n_years < 1:
            raise ConfigError("n_sites and n_years must be >= 1")
        if self.mode not in ("realistic", "exact_linear"):
            raise ConfigError(f"unknown generator mode {self.mode!r}")
        if self.noise_sd < 0:
            raise ConfigError("noise_sd must be >= 0")
        return self


def default_params(**overrides):
    """Desk-scale benchmark: 200 sites x 5 years, seed 42."""
    return replace(GenParams(), **overrides).validate()


def stress_params(**overrides):
    """Low-rain profile with a pronounced summer drought."""
    base = GenParams(
        wetness_range=(8.0, 16.0),
        summer_dryness_range=(0.8, 0.95),
        water_half_saturation=40.0,
    )
    return replace(base, **overrides).validate()


def exact_linear_params(**overrides):
    """Noiseless autoregressive ground truth for oracle tests."""
    base = GenParams(n_sites=50, n_years=2, mode="exact_linear", noise_sd=0.0)
    return replace(base, **overrides).validate()


PRESETS = {
    "default": default_params,
    "stress": stress_params,
    "exact-linear": exact_linear_params,
}


@dataclass
class _SiteProfile:
    temp_mean: float
    temp_amplitude: float
    temp_spread: float
    rg_scale: float
    wetness: float
    summer_dryness: float


def _site_profile(params, site):
    rng = child_rng(params.seed, "site", site)
    return _SiteProfile(
        temp_mean=rng.uniform(*params.temp_mean_range),
        temp_amplitude=rng.uniform(*params.temp_amplitude_range),
        temp_spread=rng.uniform(*params.temp_spread_range),
        rg_scale=rng.uniform(0.9, 1.1),
        wetness=rng.uniform(*params.wetness_range),
        summer_dryness=rng.uniform(*params.summer_dryness_range),
    )


def _year_climate(params, profile, rng):
    """Arrays (t_min, t_max, t_avg, rain, rg, im) over the 37 periods."""
    doy = (np.arange(N_PERIODS) + 0.5) * (DAYS_PER_YEAR / N_PERIODS)
    season = np.cos(2.0 * np.pi * (doy - params.temp_coldest_day) / DAYS_PER_YEAR)

    t_avg = (
        profile.temp_mean
        - profile.temp_amplitude * season
        + rng.normal(0.0, params.temp_noise_sd, N_PERIODS)
    )
    half = profile.temp_spread / 2.0
    t_min = t_avg - half * rng.uniform(0.7, 1.3, N_PERIODS)
    t_max = t_avg + half * rng.uniform(0.7, 1.3, N_PERIODS)

    rg = profile.rg_scale * (
        params.rg_mean
        - params.rg_amplitude * np.cos(2.0 * np.pi * (doy - 20.0) / DAYS_PER_YEAR)
    ) + rng.normal(0.0, params.rg_noise_sd, N_PERIODS)
    np.clip(rg, 250.0, None, out=rg)

    summer = np.exp(-(((doy - 200.0) / 60.0) ** 2))
    rain_level = profile.wetness * (1.0 - profile.summer_dryness * summer)
    rain = rng.gamma(params.rain_shape, rain_level / params.rain_shape, N_PERIODS)
    np.clip(rain, 0.0, None, out=rain)

    im = np.array([martonne_index(r, t) for r, t in zip(rain, t_avg)])
    return t_min, t_max, t_avg, rain, rg, im


def _realistic_growth(params, climate, rng):
    _, _, t_avg, rain, rg, _ = climate
    temp_factor = np.exp(-(((t_avg - params.temp_optimum) / params.temp_width) ** 2))
    light_factor = rg / (rg + params.rg_half_saturation)

    growth = np.empty(N_PERIODS)
    soil = 2.0 * params.water_half_saturation  # start the reservoir well-watered
    prev = None
    noise = (
        rng.normal(0.0, params.noise_sd, N_PERIODS)
        if params.noise_sd > 0
        else np.zeros(N_PERIODS)
    )
    for t in range(N_PERIODS):
        soil = params.soil_carryover * soil + rain[t]
        water_factor = soil / (soil + params.water_half_saturation)
        potential = params.growth_ceiling * temp_factor[t] * light_factor[t] * water_factor
        if prev is None:
            prev = potential  # steady-state start, no January transient
        g = params.ar_smoothing * prev + (1.0 - params.ar_smoothing) * potential + noise[t]
        growth[t] = max(g, 0.0)
        prev = growth[t]
    return growth


def _exact_linear_growth(climate):
    t_min, t_max, t_avg, rain, rg, im = climate
    Y = np.column_stack([t_min, t_max, t_avg, rain, rg, im])
    psi = np.asarray(EXACT_LINEAR_PSI)
    phi = EXACT_LINEAR_PHI
    p = len(phi)
    growth = np.empty(N_PERIODS)
    growth[:p] = EXACT_LINEAR_INIT
    for t in range(p, N_PERIODS):
        g = EXACT_LINEAR_BIAS
        for i, coef in enumerate(phi, start=1):
            g += coef * growth[t - i]
        for j in range(p + 1):
            g += float(psi[j] @ Y[t - j])
        growth[t] = g
    return growth


def generate_record(params, site, year):
    """One validated annual record; independent of all other records."""
    profile = _site_profile(params, site)
    rng = child_rng(params.seed, "weather", site, year)
    climate = _year_climate(params, profile, rng)
    if params.mode == "exact_linear":
        growth = _exact_linear_growth(climate)
    else:
        growth = _realistic_growth(params, climate, rng)
    steps = tuple(
        ClimateStep(*(float(arr[t]) for arr in climate)) for t in range(N_PERIODS)
    )
    record = AnnualRecord(
        site_id=f"S{site:04d}",
        year=year,
        growth=growth,
        climate=steps,
        cumulative=annual_cumulative(growth),
    )
    record.validate()
    return record


def generate_dataset(params):
    params.validate()
    records = []
    for site in range(params.n_sites):
        for year in range(params.first_year, params.first_year + params.n_years):
            records.append(generate_record(params, site, year))
    return Dataset.from_records(records)


def write_dataset(ds, path):
    """Emit the canonical CSV; floats keep their shortest exact repr."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for rec in ds.records:
                for t in range(N_PERIODS):
                    step = rec.climate[t]
                    writer.writerow([
                        rec.site_id,
                        rec.year,
                        t + 1,
                        repr(step.t_min),
                        repr(step.t_max),
                        repr(step.t_avg),
                        repr(step.rain),
                        repr(step.rg),
                        repr(step.im),
                        repr(float(rec.growth[t])),
                    ])
    except OSError as exc:
        raise IoError(f"cannot write dataset {path}: {exc}") from None
