"""Two-step country fitting pipeline and synthetic data generation.

Step one pins the agrarian decay rate: on the observations with a positive
agrarian share, ln(a) against g is an exact line with slope -k1 and
intercept k1 * g0, so an ordinary least squares fit recovers k1 and a
starting guess for g0.  Step two holds that k1 fixed and searches
(k2, alpha, g0) inside a box with the shuffled-complex-evolution minimizer,
scoring a candidate by the sum over sectors of the mean squared error
between modeled and observed shares.  A fit is accepted when that sum is
below the acceptance threshold.

Per-country optimizer seeds are derived from the global seed and the
country code, so results do not depend on how many or in which order other
countries are fitted.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .model import (
    EPS_DEGENERATE,
    CollapseDomainError,
    ModelParams,
    TransferType,
    UnclassifiableParamsError,
    classify,
    collapse_display,
    collapse_transform,
    g_max_industry,
    shares_curve,
)
from .numerics import DegenerateDataError, ols_fit
from .sce import Bounds, OptimizerConfig, OptResult, minimize

__all__ = [
    "DEFAULT_K2_BOUNDS",
    "DEFAULT_ALPHA_BOUNDS",
    "DEFAULT_G0_BOUNDS",
    "DEFAULT_THRESHOLD",
    "CountrySeries",
    "FitConfig",
    "FitResult",
    "FitFailure",
    "FitSummary",
    "FitOutcome",
    "CollapsePoint",
    "IneligibleSeriesError",
    "InsufficientDataError",
    "derive_seed",
    "step1_fit",
    "fit_objective",
    "step2_fit",
    "fit_country",
    "fit_all",
    "synth_generate",
    "collapse_points_for",
]

DEFAULT_K2_BOUNDS = (-5.0, 5.0)
DEFAULT_ALPHA_BOUNDS = (0.0, 5.0)
DEFAULT_G0_BOUNDS = (1.0, 15.0)
DEFAULT_THRESHOLD = 0.1
DEFAULT_MIN_OBS = 4


class IneligibleSeriesError(ValueError):
    """Series has fewer observations than the eligibility minimum."""


class InsufficientDataError(ValueError):
    """Not enough usable observations for the step-one regression."""


@dataclass(frozen=True, eq=False)
class CountrySeries:
    """Cleaned observations for one country.

    years must be strictly increasing; g is ln(GDP per capita) and need not
    be monotone; shares is (n, 3) with columns (a, i, s), every entry in
    [0, 1] and every row summing to 1 within 1e-9.
    """

    code: str
    name: str
    years: np.ndarray
    g: np.ndarray
    shares: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        g = np.asarray(self.g, dtype=float)
        shares = np.asarray(self.shares, dtype=float)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "shares", shares)
        if years.ndim != 1 or g.shape != years.shape:
            raise ValueError(f"{self.code}: years {years.shape} and g {g.shape} must be equal-length 1-d")
        if shares.shape != (years.size, 3):
            raise ValueError(f"{self.code}: shares must be ({years.size}, 3), got {shares.shape}")
        if years.size and np.any(np.diff(years) <= 0):
            raise ValueError(f"{self.code}: years must be strictly increasing")
        if not np.all(np.isfinite(g)):
            raise ValueError(f"{self.code}: g contains non-finite values")
        if not np.all(np.isfinite(shares)):
            raise ValueError(f"{self.code}: shares contain non-finite values")
        if np.any(shares < 0.0) or np.any(shares > 1.0):
            raise ValueError(f"{self.code}: shares must lie in [0, 1]")
        if years.size and np.max(np.abs(shares.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError(f"{self.code}: share rows must sum to 1 within 1e-9")

    @property
    def n_obs(self) -> int:
        return int(self.years.size)


@dataclass(frozen=True)
class FitConfig:
    """Pipeline settings; the defaults match the reference procedure."""

    k2_bounds: tuple[float, float] = DEFAULT_K2_BOUNDS
    alpha_bounds: tuple[float, float] = DEFAULT_ALPHA_BOUNDS
    g0_bounds: tuple[float, float] = DEFAULT_G0_BOUNDS
    threshold: float = DEFAULT_THRESHOLD
    min_obs: int = DEFAULT_MIN_OBS
    seed: int = 42
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters and quality measures for one country."""

    code: str
    params: ModelParams
    mse_a: float
    mse_i: float
    mse_s: float
    mse_sum: float
    accepted: bool
    transfer_type: TransferType | None
    g_max_i: float | None
    n_obs: int
    evaluations_used: int


@dataclass(frozen=True)
class FitFailure:
    code: str
    reason: str


@dataclass(frozen=True)
class FitSummary:
    """Tallies over one fit_all run."""

    n_series: int
    n_eligible: int
    n_fitted: int
    n_accepted: int
    type_counts: dict[int, int]
    n_unclassifiable: int


@dataclass(frozen=True)
class FitOutcome:
    results: tuple[FitResult, ...]
    failures: tuple[FitFailure, ...]
    summary: FitSummary


@dataclass(frozen=True)
class CollapsePoint:
    """One observation mapped onto the master-curve coordinates.

    x_display / y_display are None when the type-specific display transform
    is undefined for the point.
    """

    code: str
    year: int
    type_id: int | None
    x: float
    y: float
    x_display: float | None
    y_display: float | None


def derive_seed(seed: int, code: str) -> int:
    """Stable per-country optimizer seed from the global seed and code."""
    digest = hashlib.blake2b(f"{seed}:{code}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _step1_arrays(g: np.ndarray, shares: np.ndarray) -> tuple[float, float]:
    a = shares[:, 0]
    mask = a > 0.0
    usable = int(np.count_nonzero(mask))
    if usable < 2:
        raise InsufficientDataError(
            f"need at least 2 observations with a > 0 for the log-linear step, got {usable}"
        )
    slope, intercept, _ = ols_fit(g[mask], np.log(a[mask]))
    k1 = -slope
    if abs(k1) <= EPS_DEGENERATE:
        raise DegenerateDataError("agrarian share shows no trend in g: k1 = 0, g0 undefined")
    return k1, intercept / k1


def step1_fit(series: CountrySeries) -> tuple[float, float]:
    """Recover (k1, g0 initial guess) from the agrarian share alone.

    Observations with a <= 0 carry no log information and are skipped here;
    they still count in the step-two objective.
    """
    return _step1_arrays(series.g, series.shares)


def _mse_by_sector(g: np.ndarray, shares: np.ndarray, params: ModelParams) -> np.ndarray | None:
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        model = shares_curve(params, g)
    if not np.all(np.isfinite(model)):
        return None
    diff = model - shares
    return np.mean(diff * diff, axis=0)


def _objective_arrays(g: np.ndarray, shares: np.ndarray, params: ModelParams) -> float:
    mse = _mse_by_sector(g, shares, params)
    return math.inf if mse is None else float(mse.sum())


def fit_objective(series: CountrySeries, params: ModelParams) -> float:
    """Sum over sectors of the mean squared share error; +inf on overflow."""
    return _objective_arrays(series.g, series.shares, params)


def _clamp_interior(value: float, bounds: tuple[float, float]) -> float:
    # Warm starts must sit strictly inside the box or the optimizer rejects them.
    lo, hi = bounds
    margin = 1e-6 * (hi - lo)
    return float(min(max(value, lo + margin), hi - margin))


def step2_fit(
    series: CountrySeries,
    k1: float,
    g0_init: float,
    config: FitConfig | None = None,
) -> tuple[ModelParams, OptResult]:
    """Search (k2, alpha, g0) with k1 held fixed at the step-one value.

    The warm start is (0.5, 0.5, g0_init), each coordinate clamped into its
    box.  Returns the assembled parameters and the raw optimizer result.
    """
    if config is None:
        config = FitConfig()
    bounds = Bounds.from_pairs([config.k2_bounds, config.alpha_bounds, config.g0_bounds])
    x0 = [
        _clamp_interior(0.5, config.k2_bounds),
        _clamp_interior(0.5, config.alpha_bounds),
        _clamp_interior(g0_init, config.g0_bounds),
    ]
    g, shares = series.g, series.shares

    def objective(x: np.ndarray) -> float:
        return _objective_arrays(g, shares, ModelParams(k1, float(x[0]), float(x[1]), float(x[2])))

    result = minimize(objective, bounds, config.optimizer, x0=x0)
    best = result.best_point
    params = ModelParams(k1=k1, k2=float(best[0]), alpha=float(best[1]), g0=float(best[2]))
    return params, result


def fit_country(series: CountrySeries, config: FitConfig | None = None) -> FitResult:
    """Run both fitting steps and assemble the per-country result.

    k1 in the result is bit-identical to the step-one estimate.  Raises
    IneligibleSeriesError below the observation minimum; step-one failures
    (no usable agrarian data, zero decay rate) propagate as
    InsufficientDataError / DegenerateDataError.
    """
    if config is None:
        config = FitConfig()
    if series.n_obs < config.min_obs:
        raise IneligibleSeriesError(
            f"{series.code}: {series.n_obs} observations, need at least {config.min_obs}"
        )
    k1, g0_init = step1_fit(series)
    per_country = replace(
        config, optimizer=replace(config.optimizer, seed=derive_seed(config.seed, series.code))
    )
    params, opt = step2_fit(series, k1, g0_init, per_country)
    mse = _mse_by_sector(series.g, series.shares, params)
    if mse is None:
        mse_a = mse_i = mse_s = mse_sum = math.inf
    else:
        mse_a, mse_i, mse_s = (float(v) for v in mse)
        mse_sum = mse_a + mse_i + mse_s
    try:
        transfer_type: TransferType | None = classify(params)
    except UnclassifiableParamsError:
        transfer_type = None
    return FitResult(
        code=series.code,
        params=params,
        mse_a=mse_a,
        mse_i=mse_i,
        mse_s=mse_s,
        mse_sum=mse_sum,
        accepted=mse_sum < config.threshold,
        transfer_type=transfer_type,
        g_max_i=g_max_industry(params),
        n_obs=series.n_obs,
        evaluations_used=opt.evaluations_used,
    )


def _fit_worker(item: tuple[CountrySeries, FitConfig]):
    series, config = item
    try:
        return fit_country(series, config)
    except (InsufficientDataError, DegenerateDataError) as exc:
        return FitFailure(series.code, str(exc))


def fit_all(
    dataset: Iterable[CountrySeries],
    config: FitConfig | None = None,
    jobs: int = 1,
) -> FitOutcome:
    """Fit every eligible series; failures are recorded, never raised.

    Results come back sorted by country code and each country's optimizer
    seed depends only on (global seed, code), so the outcome is independent
    of input order and of the number of worker processes.
    """
    if config is None:
        config = FitConfig()
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    ordered = sorted(dataset, key=lambda s: s.code)
    failures: list[FitFailure] = []
    eligible: list[CountrySeries] = []
    for series in ordered:
        if series.n_obs >= config.min_obs:
            eligible.append(series)
        else:
            failures.append(
                FitFailure(series.code, f"{series.n_obs} observations, need at least {config.min_obs}")
            )
    items = [(series, config) for series in eligible]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_fit_worker, items))
    else:
        outputs = [_fit_worker(item) for item in items]
    results: list[FitResult] = []
    for out in outputs:
        if isinstance(out, FitResult):
            results.append(out)
        else:
            failures.append(out)
    results.sort(key=lambda r: r.code)
    failures.sort(key=lambda f: f.code)
    type_counts: dict[int, int] = {}
    n_unclassifiable = 0
    for r in results:
        if r.transfer_type is None:
            n_unclassifiable += 1
        else:
            type_counts[r.transfer_type.id] = type_counts.get(r.transfer_type.id, 0) + 1
    summary = FitSummary(
        n_series=len(ordered),
        n_eligible=len(eligible),
        n_fitted=len(results),
        n_accepted=sum(r.accepted for r in results),
        type_counts=dict(sorted(type_counts.items())),
        n_unclassifiable=n_unclassifiable,
    )
    return FitOutcome(results=tuple(results), failures=tuple(failures), summary=summary)


def synth_generate(
    params: ModelParams,
    g_grid,
    noise_sigma: float = 0.0,
    seed: int = 0,
    code: str = "SYN",
    name: str | None = None,
    start_year: int = 1980,
) -> CountrySeries:
    """Model-generated series, optionally with Gaussian share noise.

    Noise is added independently to a and i, s is recomputed as 1 - a - i,
    and rows are clamped to [0, 1] and renormalized so the result always
    satisfies the CountrySeries contract.  noise_sigma = 0 reproduces the
    closed-form values up to that renormalization roundoff.
    """
    g = np.asarray(g_grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError(f"g_grid must be a nonempty 1-d array, got shape {g.shape}")
    if noise_sigma < 0.0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma!r}")
    base = shares_curve(params, g)
    a = base[:, 0]
    i = base[:, 1]
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        a = a + rng.normal(0.0, noise_sigma, g.size)
        i = i + rng.normal(0.0, noise_sigma, g.size)
    s = 1.0 - a - i
    shares = np.clip(np.column_stack([a, i, s]), 0.0, 1.0)
    totals = shares.sum(axis=1)
    if np.any(totals <= 0.0):
        raise ValueError("synthetic shares collapsed to zero after clamping; grid leaves the model's valid range")
    shares = shares / totals[:, None]
    years = np.arange(start_year, start_year + g.size)
    return CountrySeries(code=code, name=name if name is not None else code, years=years, g=g, shares=shares)


def collapse_points_for(series: CountrySeries, fit: FitResult) -> list[CollapsePoint]:
    """Collapse one country's observations using its fitted parameters.

    Rows with a <= 0 fall outside the transform's domain and are skipped.
    The display transform follows the fitted type; for an unclassifiable
    fit it is the identity, and it is None where the type-3 log flip is
    undefined.
    """
    type_id = fit.transfer_type.id if fit.transfer_type is not None else None
    points: list[CollapsePoint] = []
    for year, g, row in zip(series.years, series.g, series.shares):
        a, i = float(row[0]), float(row[1])
        if a <= 0.0:
            continue
        x, y = collapse_transform(fit.params, a, i)
        if type_id is None:
            x_disp, y_disp = x, y
        else:
            try:
                x_disp, y_disp = collapse_display(fit.params, x, y)
            except CollapseDomainError:
                x_disp = y_disp = None
        points.append(
            CollapsePoint(
                code=series.code,
                year=int(year),
                type_id=type_id,
                x=float(x),
                y=float(y),
                x_display=x_disp,
                y_display=y_disp,
            )
        )
    return points
