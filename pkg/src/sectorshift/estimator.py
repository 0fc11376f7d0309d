"""scikit-learn style estimators over the transfer model.

ThreeSectorTransferModel is a regressor: X holds log GDP per capita values
and y the observed (a, i, s) share rows; fit runs the two-step procedure
and predict evaluates the fitted closed forms.  CollapseTransformer maps
(a, i) share pairs onto the parameter-free master-curve coordinates for a
fixed parameter set.  Both follow the usual conventions: constructor
arguments are stored verbatim, everything learned ends in a trailing
underscore, and clones are configured via get_params / set_params.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import pipeline
from .model import (
    ModelParams,
    UnclassifiableParamsError,
    classify,
    collapse_display,
    collapse_transform,
    g_max_industry,
    shares_curve,
)
from .sce import OptimizerConfig

__all__ = ["ThreeSectorTransferModel", "CollapseTransformer", "validate_g", "validate_shares"]


def validate_g(X) -> np.ndarray:
    """Coerce X to a 1-d float array of g values.

    Accepts shape (n,) or a single-column (n, 1); anything wider is
    rejected because the model has exactly one input variable.
    """
    g = np.asarray(X, dtype=float)
    if g.ndim == 2 and g.shape[1] == 1:
        g = g[:, 0]
    if g.ndim != 1:
        raise ValueError(f"X must be (n,) or (n, 1), got shape {np.shape(X)}")
    if g.size == 0:
        raise ValueError("X is empty")
    if not np.all(np.isfinite(g)):
        raise ValueError("X contains non-finite values")
    return g


def validate_shares(y, n_rows: int | None = None) -> np.ndarray:
    """Coerce y to an (n, 3) share matrix and check the share contract.

    Every entry must lie in [0, 1] and every row must sum to 1 within
    1e-9, the same invariant the ingestion pipeline guarantees.
    """
    shares = np.asarray(y, dtype=float)
    if shares.ndim != 2 or shares.shape[1] != 3:
        raise ValueError(f"y must have shape (n, 3), got {np.shape(y)}")
    if n_rows is not None and shares.shape[0] != n_rows:
        raise ValueError(f"X has {n_rows} rows but y has {shares.shape[0]}")
    if not np.all(np.isfinite(shares)):
        raise ValueError("y contains non-finite values")
    if np.any(shares < 0.0) or np.any(shares > 1.0):
        raise ValueError("shares must lie in [0, 1]")
    if np.max(np.abs(shares.sum(axis=1) - 1.0)) > 1e-9:
        raise ValueError("share rows must sum to 1 within 1e-9; renormalize first")
    return shares


class ThreeSectorTransferModel(RegressorMixin, BaseEstimator):
    """Fit the three-sector transfer curves to (g, shares) observations.

    Parameters
    ----------
    k2_bounds, alpha_bounds, g0_bounds : (low, high) tuples
        Search box for the free parameters in the second fitting step.
    acceptance_threshold : float, default 0.1
        A fit is accepted when the summed per-sector MSE is below this.
    n_complexes, points_per_complex, subcomplex_size, evolutions_per_complex,
    max_evaluations, convergence_tol, convergence_window :
        Optimizer geometry and budget; None picks the dimension defaults.
    random_state : int, default 42
        Seed for the optimizer's random draws.

    Attributes
    ----------
    k1_, k2_, alpha_, g0_ : float
        Fitted parameters; k1_ comes from the log-linear first step.
    params_ : ModelParams
    mse_a_, mse_i_, mse_s_, mse_sum_ : float
    accepted_ : bool
    transfer_type_ : TransferType or None
        None when the parameters sit on a classification boundary.
    g_max_industry_ : float or None
        Location of the industrial-share extremum when it exists.
    n_evaluations_ : int
        Objective evaluations spent by the optimizer.
    """

    def __init__(
        self,
        k2_bounds=pipeline.DEFAULT_K2_BOUNDS,
        alpha_bounds=pipeline.DEFAULT_ALPHA_BOUNDS,
        g0_bounds=pipeline.DEFAULT_G0_BOUNDS,
        acceptance_threshold=pipeline.DEFAULT_THRESHOLD,
        n_complexes=4,
        points_per_complex=None,
        subcomplex_size=None,
        evolutions_per_complex=None,
        max_evaluations=50_000,
        convergence_tol=1e-8,
        convergence_window=10,
        random_state=42,
    ):
        self.k2_bounds = k2_bounds
        self.alpha_bounds = alpha_bounds
        self.g0_bounds = g0_bounds
        self.acceptance_threshold = acceptance_threshold
        self.n_complexes = n_complexes
        self.points_per_complex = points_per_complex
        self.subcomplex_size = subcomplex_size
        self.evolutions_per_complex = evolutions_per_complex
        self.max_evaluations = max_evaluations
        self.convergence_tol = convergence_tol
        self.convergence_window = convergence_window
        self.random_state = random_state

    def _fit_config(self) -> pipeline.FitConfig:
        optimizer = OptimizerConfig(
            n_complexes=self.n_complexes,
            points_per_complex=self.points_per_complex,
            subcomplex_size=self.subcomplex_size,
            evolutions_per_complex=self.evolutions_per_complex,
            max_evaluations=self.max_evaluations,
            convergence_tol=self.convergence_tol,
            convergence_window=self.convergence_window,
            seed=self.random_state,
        )
        return pipeline.FitConfig(
            k2_bounds=tuple(self.k2_bounds),
            alpha_bounds=tuple(self.alpha_bounds),
            g0_bounds=tuple(self.g0_bounds),
            threshold=self.acceptance_threshold,
            min_obs=2,
            seed=self.random_state,
            optimizer=optimizer,
        )

    def fit(self, X, y):
        g = validate_g(X)
        shares = validate_shares(y, n_rows=g.size)
        config = self._fit_config()
        k1, g0_init = pipeline._step1_arrays(g, shares)
        series = pipeline.CountrySeries(
            code="<fit>", name="<fit>", years=np.arange(g.size), g=g, shares=shares
        )
        params, opt = pipeline.step2_fit(series, k1, g0_init, config)
        mse = pipeline._mse_by_sector(g, shares, params)
        if mse is None:
            self.mse_a_ = self.mse_i_ = self.mse_s_ = self.mse_sum_ = float("inf")
        else:
            self.mse_a_, self.mse_i_, self.mse_s_ = (float(v) for v in mse)
            self.mse_sum_ = self.mse_a_ + self.mse_i_ + self.mse_s_
        self.params_ = params
        self.k1_ = params.k1
        self.k2_ = params.k2
        self.alpha_ = params.alpha
        self.g0_ = params.g0
        self.accepted_ = bool(self.mse_sum_ < self.acceptance_threshold)
        try:
            self.transfer_type_ = classify(params)
        except UnclassifiableParamsError:
            self.transfer_type_ = None
        self.g_max_industry_ = g_max_industry(params)
        self.n_evaluations_ = opt.evaluations_used
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        """Closed-form (a, i, s) rows at the given g values."""
        check_is_fitted(self, "params_")
        g = validate_g(X)
        return shares_curve(self.params_, g)

    def score(self, X, y) -> float:
        """Negative summed per-sector MSE (greater is better)."""
        check_is_fitted(self, "params_")
        g = validate_g(X)
        shares = validate_shares(y, n_rows=g.size)
        mse = pipeline._mse_by_sector(g, shares, self.params_)
        return float("-inf") if mse is None else -float(mse.sum())


class CollapseTransformer(TransformerMixin, BaseEstimator):
    """Map (a, i) share pairs onto the master-curve coordinates.

    Parameters
    ----------
    k1, k2, alpha : float
        Parameter set defining the transform; g0 plays no role in it.
    display : bool, default False
        Apply the type-specific display convention to the output.  Rows
        where it is undefined come back as NaN.

    The transform is stateless, so fit only validates the parameters.
    """

    def __init__(self, k1=1.0, k2=0.5, alpha=1.0, display=False):
        self.k1 = k1
        self.k2 = k2
        self.alpha = alpha
        self.display = display

    def _params(self) -> ModelParams:
        # g0 does not enter the collapse; 0 is a placeholder.
        return ModelParams(k1=float(self.k1), k2=float(self.k2), alpha=float(self.alpha), g0=0.0)

    def fit(self, X, y=None):
        params = self._params()
        if self.display:
            classify(params)
        self.params_ = params
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        pairs = np.asarray(X, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError(f"X must have shape (n, 2) with (a, i) columns, got {np.shape(X)}")
        x, y = collapse_transform(self.params_, pairs[:, 0], pairs[:, 1])
        x = np.atleast_1d(x)
        y = np.atleast_1d(y)
        if not self.display:
            return np.column_stack([x, y])
        out = np.empty((x.size, 2))
        for row in range(x.size):
            try:
                out[row] = collapse_display(self.params_, float(x[row]), float(y[row]))
            except ValueError:
                out[row] = np.nan
        return out
