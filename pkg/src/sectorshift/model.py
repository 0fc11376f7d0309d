"""Closed-form three-sector GDP composition transfer model.

The economy is split into an agrarian share ``a``, an industrial share ``i``
and a service share ``s`` of GDP, which evolve with the log of GDP per
capita ``g`` rather than with calendar time.  Production value moves from
agrarian to industrial activity at rate ``k1`` and from industrial to
service activity at rate ``k2``; a branching factor ``alpha`` controls how
much of the agrarian outflow passes through industry instead of going to
services directly:

    da/dg = -k1 * a
    di/dg = alpha * k1 * a - k2 * i
    ds/dg = (1 - alpha) * k1 * a + k2 * i

With the pre-industrial boundary condition ``a = 1`` at ``g = g0`` the
system integrates to

    a(g) = exp(-k1 * (g - g0))
    i(g) = alpha * k1 / (k2 - k1) * (exp(-k1 * (g - g0)) - exp(-k2 * (g - g0)))
    s(g) = 1 - a(g) - i(g)

which degenerates to ``i(g) = alpha * k1 * (g - g0) * exp(-k1 * (g - g0))``
when ``k1 == k2``.  Shares always sum to one; they are genuine fractions of
GDP only on the ``g`` range where all three stay inside [0, 1].

Sign patterns of ``(k1, k2)`` together with ``alpha`` below or above one
partition parameter space into eight transfer types, each a distinct set of
net flow directions between the three sectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
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
]

# Below this relative separation of k1 and k2 the generic closed form loses
# precision to cancellation and the analytic k1 == k2 limit is used instead.
# The same threshold decides when a rate or the branching factor sits too
# close to a classification boundary (0 for the rates, 1 for alpha).
EPS_DEGENERATE = 1e-9


class UnclassifiableParamsError(ValueError):
    """Parameters sit on a boundary between transfer types."""


class CollapseDomainError(ValueError):
    """Input outside the domain of the collapse or display transform."""


@dataclass(frozen=True)
class ModelParams:
    """Primitive parameter set (k1, k2, alpha, g0).

    k1 : agrarian outflow rate per unit of log GDP per capita.
    k2 : industrial outflow rate.
    alpha : fraction of the agrarian outflow routed through industry.
        Values above one are allowed and mean industry also absorbs value
        from services.
    g0 : log GDP per capita at which the agrarian share equals one.
    """

    k1: float
    k2: float
    alpha: float
    g0: float


@dataclass(frozen=True)
class AltParams:
    """Pairwise-rate parameterization of the same model.

    k_ai = alpha * k1 is the agrarian-to-industry rate, k_is = k2 the
    industry-to-service rate and k_as = (1 - alpha) * k1 the direct
    agrarian-to-service rate.  k_ai + k_as = k1.
    """

    k_ai: float
    k_is: float
    k_as: float
    g0: float


@dataclass(frozen=True)
class SectorShares:
    """One observation of the three GDP shares."""

    a: float
    i: float
    s: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.i, self.s], dtype=float)


@dataclass(frozen=True)
class TransferType:
    """One of the eight transfer regimes.

    ``directions`` spells out the net flow between each sector pair:
    ``a->i`` means agrarian feeds industry, ``i<->s`` means the
    industry/service flow changes direction along the trajectory and
    ``a--s`` means there is no direct agrarian/service flow.
    """

    id: int
    directions: str

    @property
    def convergent(self) -> bool:
        """Whether the service share tends to one as g grows."""
        return self.id in (1, 2)


_TRANSFER_DIRECTIONS = {
    1: "a->i, i->s, a->s",
    2: "a->i, i<->s, a--s",
    3: "a->i, s->i, a->s",
    4: "a->i, s->i, a--s",
    5: "i->a, i->s, s->a",
    6: "i->a, i->s, a--s",
    7: "i->a, s->i, s->a",
    8: "i->a, i<->s, a--s",
}


def type_from_id(type_id: int) -> TransferType:
    """Return the TransferType with the given id (1..8)."""
    if type_id not in _TRANSFER_DIRECTIONS:
        raise ValueError(f"transfer type id must be 1..8, got {type_id!r}")
    return TransferType(type_id, _TRANSFER_DIRECTIONS[type_id])


def rhs(params: ModelParams, shares: SectorShares) -> tuple[float, float, float]:
    """Right-hand side (da/dg, di/dg, ds/dg) of the transfer system."""
    a, i = shares.a, shares.i
    da = -params.k1 * a
    di = params.alpha * params.k1 * a - params.k2 * i
    ds = (1.0 - params.alpha) * params.k1 * a + params.k2 * i
    return (da, di, ds)


def _is_degenerate(k1: float, k2: float) -> bool:
    return abs(k2 - k1) <= EPS_DEGENERATE * max(abs(k1), abs(k2))


def share_a(params: ModelParams, g):
    """Agrarian share at g; accepts a scalar or an array."""
    dg = np.asarray(g, dtype=float) - params.g0
    out = np.exp(-params.k1 * dg)
    return float(out) if out.ndim == 0 else out


def share_i(params: ModelParams, g):
    """Industrial share at g; accepts a scalar or an array.

    Written as alpha * k1 * exp(-k1 dg) * (1 - exp(-(k2 - k1) dg)) / (k2 - k1)
    via expm1 so nearby k1, k2 do not cancel; at the degeneracy threshold it
    switches to the exact k1 == k2 limit.
    """
    dg = np.asarray(g, dtype=float) - params.g0
    k1, k2, alpha = params.k1, params.k2, params.alpha
    if _is_degenerate(k1, k2):
        out = alpha * k1 * dg * np.exp(-k1 * dg)
    else:
        delta = k2 - k1
        out = alpha * k1 * np.exp(-k1 * dg) * (-np.expm1(-delta * dg)) / delta
    return float(out) if out.ndim == 0 else out


def share_s(params: ModelParams, g):
    """Service share at g, the remainder 1 - a - i."""
    out = 1.0 - np.asarray(share_a(params, g)) - np.asarray(share_i(params, g))
    return float(out) if out.ndim == 0 else out


def shares_curve(params: ModelParams, g) -> np.ndarray:
    """Stack the three shares along the last axis: shape (..., 3)."""
    a = np.asarray(share_a(params, g), dtype=float)
    i = np.asarray(share_i(params, g), dtype=float)
    return np.stack([a, i, 1.0 - a - i], axis=-1)


def g_max_industry(params: ModelParams) -> float | None:
    """Location of the industrial-share extremum, or None.

    The stationary point ln(k1 / k2) / (k1 - k2) + g0 only exists when k1
    and k2 are nonzero and share a sign (types 1, 2, 7 and 8); the k1 == k2
    limit is 1 / k1 + g0.  The branching factor does not enter.
    """
    k1, k2 = params.k1, params.k2
    if abs(k1) <= EPS_DEGENERATE or abs(k2) <= EPS_DEGENERATE:
        return None
    if (k1 > 0.0) != (k2 > 0.0):
        return None
    if _is_degenerate(k1, k2):
        return 1.0 / k1 + params.g0
    return math.log(k1 / k2) / (k1 - k2) + params.g0


def classify(params: ModelParams) -> TransferType:
    """Map parameters to one of the eight transfer types.

    Raises UnclassifiableParamsError when k1, k2 or alpha sits within
    EPS_DEGENERATE of a boundary (k1 = 0, k2 = 0, alpha = 0 or alpha = 1),
    where the sign pattern is undefined.
    """
    k1, k2, alpha = params.k1, params.k2, params.alpha
    for name, distance in (
        ("k1", abs(k1)),
        ("k2", abs(k2)),
        ("alpha", abs(alpha)),
        ("alpha - 1", abs(alpha - 1.0)),
    ):
        if distance <= EPS_DEGENERATE:
            raise UnclassifiableParamsError(
                f"{name} = 0 within tolerance {EPS_DEGENERATE}; "
                "parameters sit on a transfer-type boundary"
            )
    type_id = 1
    if k1 < 0.0:
        type_id += 4
    if k2 < 0.0:
        type_id += 2
    if alpha > 1.0:
        type_id += 1
    return type_from_id(type_id)


def collapse_transform(params: ModelParams, a_obs, i_obs):
    """Map observed (a, i) pairs onto the parameter-free master relation.

    Returns (x, y) with x = a - a**(k2 / k1) and
    y = (k2 - k1) / (alpha * k1) * i; model-exact inputs land on the line
    y = x for every parameter set.  Requires a_obs > 0 and k1 != 0.
    """
    a = np.asarray(a_obs, dtype=float)
    i = np.asarray(i_obs, dtype=float)
    if abs(params.k1) <= EPS_DEGENERATE:
        raise CollapseDomainError("collapse transform undefined for k1 = 0")
    if np.any(a <= 0.0):
        raise CollapseDomainError("collapse transform requires a > 0")
    x = a - a ** (params.k2 / params.k1)
    y = (params.k2 - params.k1) / (params.alpha * params.k1) * i
    if x.ndim == 0:
        return float(x), float(y)
    return x, y


def collapse_display(params: ModelParams, x: float, y: float) -> tuple[float, float]:
    """Display coordinates for one collapsed point.

    Type 3 trajectories have x and y negative, so that panel is drawn as
    (ln(-x), ln(-y)); every other type plots (x, y) unchanged.  Raises
    CollapseDomainError for a type-3 point with x >= 0 or y >= 0.
    """
    if classify(params).id != 3:
        return (float(x), float(y))
    if x >= 0.0 or y >= 0.0:
        raise CollapseDomainError(
            f"type-3 display needs x < 0 and y < 0, got ({x!r}, {y!r})"
        )
    return (math.log(-x), math.log(-y))


def to_alt_params(params: ModelParams) -> AltParams:
    """Convert to the pairwise-rate parameterization."""
    return AltParams(
        k_ai=params.alpha * params.k1,
        k_is=params.k2,
        k_as=(1.0 - params.alpha) * params.k1,
        g0=params.g0,
    )


def from_alt_params(alt: AltParams) -> ModelParams:
    """Invert to_alt_params; requires k_ai + k_as != 0."""
    k1 = alt.k_ai + alt.k_as
    if k1 == 0.0:
        raise ValueError("k_ai + k_as = 0: primitive parameters undefined")
    return ModelParams(k1=k1, k2=alt.k_is, alpha=alt.k_ai / k1, g0=alt.g0)
