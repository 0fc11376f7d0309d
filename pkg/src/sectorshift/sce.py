"""Shuffled complex evolution global minimizer on a box.

The population is split into complexes that evolve independently and are
periodically reshuffled.  One evolution step picks a subcomplex with
triangular rank weighting, reflects its worst member through the centroid
of the remaining picks, falls back to a contraction toward the centroid,
and as a last resort replaces the member with a fresh uniform draw, so the
search can always leave a bad region.  All randomness flows from one
numpy Generator seeded by the config, which makes runs reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["Bounds", "OptimizerConfig", "OptResult", "InvalidConfigError", "minimize"]


class InvalidConfigError(ValueError):
    """Optimizer geometry or budget settings are inconsistent."""


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned search box with lower < upper in every dimension."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper) or not lower:
            raise InvalidConfigError(
                f"bound tuples must be nonempty and equal length, got {lower} / {upper}"
            )
        for d, (lo, hi) in enumerate(zip(lower, upper)):
            if not lo < hi:
                raise InvalidConfigError(f"dimension {d}: lower {lo!r} must be < upper {hi!r}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "Bounds":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def n_dim(self) -> int:
        return len(self.lower)

    def contains(self, point: np.ndarray) -> bool:
        """Strict interior test, matching how reflections are screened."""
        return bool(np.all(point > self.lower) and np.all(point < self.upper))


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for minimize; None leaves a size at its dimension default.

    Defaults: points_per_complex = 2 * n_dim + 1, subcomplex_size =
    n_dim + 1 and evolutions_per_complex = points_per_complex.
    Convergence is declared when the best value improves by less than
    convergence_tol in relative terms over convergence_window shuffles.
    """

    n_complexes: int = 4
    points_per_complex: int | None = None
    subcomplex_size: int | None = None
    evolutions_per_complex: int | None = None
    max_evaluations: int = 50_000
    convergence_tol: float = 1e-8
    convergence_window: int = 10
    seed: int = 42

    def resolve(self, n_dim: int) -> tuple[int, int, int, int]:
        """Concrete (n_complexes, points_per_complex, subcomplex_size, evolutions)."""
        ppc = self.points_per_complex if self.points_per_complex is not None else 2 * n_dim + 1
        sub = self.subcomplex_size if self.subcomplex_size is not None else n_dim + 1
        evo = self.evolutions_per_complex if self.evolutions_per_complex is not None else ppc
        if self.n_complexes < 1:
            raise InvalidConfigError(f"n_complexes must be >= 1, got {self.n_complexes}")
        if sub < 2:
            raise InvalidConfigError(f"subcomplex_size must be >= 2, got {sub}")
        if ppc < sub:
            raise InvalidConfigError(
                f"points_per_complex {ppc} must be >= subcomplex_size {sub}"
            )
        if evo < 1:
            raise InvalidConfigError(f"evolutions_per_complex must be >= 1, got {evo}")
        if self.max_evaluations < 1:
            raise InvalidConfigError(f"max_evaluations must be >= 1, got {self.max_evaluations}")
        if self.convergence_window < 1:
            raise InvalidConfigError(f"convergence_window must be >= 1, got {self.convergence_window}")
        if not self.convergence_tol >= 0.0:
            raise InvalidConfigError(f"convergence_tol must be >= 0, got {self.convergence_tol}")
        return self.n_complexes, ppc, sub, evo


@dataclass(frozen=True)
class OptResult:
    """Best point found plus bookkeeping for convergence analysis."""

    best_point: np.ndarray
    best_value: float
    evaluations_used: int
    converged: bool
    shuffle_best_values: tuple[float, ...]


class _BudgetExhausted(Exception):
    pass


def _triangular_weights(size: int) -> np.ndarray:
    # Rank j (0 = best) is drawn with probability 2 (size - j) / (size (size + 1)).
    ranks = np.arange(size, dtype=float)
    return 2.0 * (size - ranks) / (size * (size + 1.0))


def minimize(
    objective: Callable[[np.ndarray], float],
    bounds: Bounds,
    config: OptimizerConfig | None = None,
    x0: Sequence[float] | None = None,
) -> OptResult:
    """Minimize objective over the box.

    objective maps a 1-d point to a float; +inf (or nan, treated as +inf)
    marks an infeasible point.  When x0 is given it must lie inside the box
    and replaces one member of the initial population, so a caller-supplied
    warm start is always evaluated.
    """
    if config is None:
        config = OptimizerConfig()
    n_dim = bounds.n_dim
    n_complexes, ppc, sub, evo = config.resolve(n_dim)
    lower = np.asarray(bounds.lower, dtype=float)
    upper = np.asarray(bounds.upper, dtype=float)
    rng = np.random.default_rng(config.seed)

    evaluations = 0
    best_point: np.ndarray | None = None
    best_value = np.inf

    def evaluate(point: np.ndarray) -> float:
        nonlocal evaluations, best_point, best_value
        if evaluations >= config.max_evaluations:
            raise _BudgetExhausted
        value = float(objective(point))
        if np.isnan(value):
            value = np.inf
        evaluations += 1
        if value < best_value:
            best_value = value
            best_point = point.copy()
        return value

    n_points = n_complexes * ppc
    points = rng.uniform(lower, upper, size=(n_points, n_dim))
    if x0 is not None:
        start = np.asarray(x0, dtype=float)
        if start.shape != (n_dim,):
            raise ValueError(f"x0 must have shape ({n_dim},), got {start.shape}")
        if not bounds.contains(start):
            raise ValueError(f"x0 {start!r} is not strictly inside the bounds")
        points[0] = start

    values = np.empty(n_points)
    weights = _triangular_weights(ppc)
    shuffle_best: list[float] = []
    converged = False

    try:
        for idx in range(n_points):
            values[idx] = evaluate(points[idx])

        while True:
            order = np.argsort(values, kind="stable")
            points = points[order]
            values = values[order]

            for c in range(n_complexes):
                # Stride dealing: complex c holds ranks c, c + n_complexes, ...
                members = np.arange(c, n_points, n_complexes)
                cpoints = points[members]
                cvalues = values[members]
                for _ in range(evo):
                    # picks are ranks within the complex, kept sorted below.
                    picks = rng.choice(ppc, size=sub, replace=False, p=weights)
                    picks.sort()
                    worst = picks[-1]
                    centroid = cpoints[picks[:-1]].mean(axis=0)
                    new_point = None
                    new_value = np.inf
                    reflected = 2.0 * centroid - cpoints[worst]
                    if bounds.contains(reflected):
                        candidate = evaluate(reflected)
                        if candidate < cvalues[worst]:
                            new_point, new_value = reflected, candidate
                    if new_point is None:
                        contracted = 0.5 * (centroid + cpoints[worst])
                        candidate = evaluate(contracted)
                        if candidate < cvalues[worst]:
                            new_point, new_value = contracted, candidate
                    if new_point is None:
                        new_point = rng.uniform(lower, upper, size=n_dim)
                        new_value = evaluate(new_point)
                    cpoints[worst] = new_point
                    cvalues[worst] = new_value
                    local = np.argsort(cvalues, kind="stable")
                    cpoints = cpoints[local]
                    cvalues = cvalues[local]
                points[members] = cpoints
                values[members] = cvalues

            shuffle_best.append(float(values.min()))
            window = config.convergence_window
            if len(shuffle_best) > window:
                previous = shuffle_best[-window - 1]
                current = shuffle_best[-1]
                scale = max(abs(previous), np.finfo(float).tiny)
                if (previous - current) / scale < config.convergence_tol:
                    converged = True
                    break
            if evaluations >= config.max_evaluations:
                break
    except _BudgetExhausted:
        converged = False

    assert best_point is not None, "no objective evaluation completed"
    return OptResult(
        best_point=best_point,
        best_value=float(best_value),
        evaluations_used=evaluations,
        converged=converged,
        shuffle_best_values=tuple(shuffle_best),
    )
