"""Three-sector GDP composition transfer model.

Fits a two-rate compartmental model of agrarian/industrial/service GDP
shares against log GDP per capita, classifies countries into eight
transfer types, and collapses observations onto a parameter-free master
curve.  See :mod:`sectorshift.model` for the closed forms,
:mod:`sectorshift.pipeline` for the two-step fitting procedure and
:mod:`sectorshift.estimator` for the scikit-learn style wrappers.
"""

from .estimator import CollapseTransformer, ThreeSectorTransferModel
from .model import (
    EPS_DEGENERATE,
    AltParams,
    CollapseDomainError,
    ModelParams,
    SectorShares,
    TransferType,
    UnclassifiableParamsError,
    classify,
    collapse_display,
    collapse_transform,
    from_alt_params,
    g_max_industry,
    rhs,
    share_a,
    share_i,
    share_s,
    shares_curve,
    to_alt_params,
    type_from_id,
)
from .pipeline import (
    CountrySeries,
    FitConfig,
    FitOutcome,
    FitResult,
    collapse_points_for,
    fit_all,
    fit_country,
    fit_objective,
    step1_fit,
    step2_fit,
    synth_generate,
)
from .sce import Bounds, OptimizerConfig, OptResult, minimize

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EPS_DEGENERATE",
    "ModelParams",
    "AltParams",
    "SectorShares",
    "TransferType",
    "UnclassifiableParamsError",
    "CollapseDomainError",
    "rhs",
    "share_a",
    "share_i",
    "share_s",
    "shares_curve",
    "g_max_industry",
    "classify",
    "type_from_id",
    "collapse_transform",
    "collapse_display",
    "to_alt_params",
    "from_alt_params",
    "Bounds",
    "OptimizerConfig",
    "OptResult",
    "minimize",
    "CountrySeries",
    "FitConfig",
    "FitResult",
    "FitOutcome",
    "step1_fit",
    "step2_fit",
    "fit_objective",
    "fit_country",
    "fit_all",
    "synth_generate",
    "collapse_points_for",
    "ThreeSectorTransferModel",
    "CollapseTransformer",
]
