import numpy as np
import pytest

from sectorshift.sce import (
    Bounds,
    InvalidConfigError,
    OptimizerConfig,
    _triangular_weights,
    minimize,
)


def sphere(p):
    return float(np.dot(p, p))


def rosenbrock(p):
    x, y = p
    return (1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2


BOX3 = Bounds.from_pairs([(-5.0, 5.0)] * 3)
BOX2 = Bounds.from_pairs([(-2.0, 2.0), (-2.0, 2.0)])


# ---------------------------------------------------------------- bounds


def test_bounds_construction():
    b = Bounds.from_pairs([(0.0, 1.0), (-1.0, 2.0)])
    assert b.lower == (0.0, -1.0)
    assert b.upper == (1.0, 2.0)
    assert b.n_dim == 2


def test_bounds_reject_empty_or_inverted():
    with pytest.raises(InvalidConfigError):
        Bounds(lower=(1.0,), upper=(0.0,))
    with pytest.raises(InvalidConfigError):
        Bounds(lower=(0.0,), upper=(0.0,))
    with pytest.raises(InvalidConfigError):
        Bounds(lower=(), upper=())
    with pytest.raises(InvalidConfigError):
        Bounds(lower=(0.0, 1.0), upper=(1.0,))


def test_bounds_interior_test():
    b = Bounds.from_pairs([(0.0, 1.0)])
    assert b.contains(np.array([0.5]))
    assert not b.contains(np.array([0.0]))  # boundary is not interior
    assert not b.contains(np.array([1.5]))


# ---------------------------------------------------------------- config


@pytest.mark.parametrize(
    "config",
    [
        OptimizerConfig(n_complexes=0),
        OptimizerConfig(subcomplex_size=1),
        OptimizerConfig(points_per_complex=2),  # below default subcomplex size
        OptimizerConfig(evolutions_per_complex=0),
        OptimizerConfig(max_evaluations=0),
        OptimizerConfig(convergence_window=0),
        OptimizerConfig(convergence_tol=-1.0),
    ],
)
def test_invalid_configs_rejected(config):
    with pytest.raises(InvalidConfigError):
        minimize(sphere, BOX3, config)


def test_config_dimension_defaults():
    assert OptimizerConfig().resolve(3) == (4, 7, 4, 7)
    assert OptimizerConfig(points_per_complex=9, subcomplex_size=3).resolve(2) == (4, 9, 3, 9)


def test_triangular_weights():
    w = _triangular_weights(7)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(w) < 0.0)  # better ranks drawn more often
    assert w[0] == pytest.approx(2.0 / 8.0, abs=1e-15)


# ---------------------------------------------------------------- search


def test_finds_sphere_minimum():
    config = OptimizerConfig(max_evaluations=10_000, seed=0)
    result = minimize(sphere, BOX3, config)
    assert result.best_value < 1e-8
    np.testing.assert_allclose(result.best_point, 0.0, atol=1e-4)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_sphere_minimum_across_seeds(seed):
    config = OptimizerConfig(max_evaluations=10_000, seed=seed)
    assert minimize(sphere, BOX3, config).best_value < 1e-8


def test_finds_rosenbrock_valley():
    result = minimize(rosenbrock, BOX2, OptimizerConfig(seed=42))
    np.testing.assert_allclose(result.best_point, [1.0, 1.0], atol=1e-3)
    assert result.converged
    assert result.evaluations_used < 50_000


def test_deterministic_given_seed():
    config = OptimizerConfig(max_evaluations=5_000, seed=9)
    a = minimize(rosenbrock, BOX2, config)
    b = minimize(rosenbrock, BOX2, config)
    np.testing.assert_array_equal(a.best_point, b.best_point)
    assert a.best_value == b.best_value
    assert a.evaluations_used == b.evaluations_used
    assert a.shuffle_best_values == b.shuffle_best_values


def test_every_trial_point_stays_in_the_box():
    seen = []

    def recording(p):
        seen.append(p.copy())
        return sphere(p)

    minimize(recording, BOX3, OptimizerConfig(max_evaluations=2_000, seed=5))
    pts = np.array(seen)
    assert np.all(pts >= -5.0) and np.all(pts <= 5.0)


def test_best_value_never_regresses_between_shuffles():
    result = minimize(rosenbrock, BOX2, OptimizerConfig(max_evaluations=5_000, seed=3))
    history = np.array(result.shuffle_best_values)
    assert np.all(np.diff(history) <= 0.0)
    assert result.best_value == history[-1]


def test_budget_exhaustion_reported():
    result = minimize(rosenbrock, BOX2, OptimizerConfig(max_evaluations=60, seed=1))
    assert result.evaluations_used <= 60
    assert not result.converged
    assert np.isfinite(result.best_value)


def test_warm_start_is_used():
    x0 = (0.01, -0.02, 0.03)
    result = minimize(sphere, BOX3, OptimizerConfig(max_evaluations=500, seed=4), x0=x0)
    assert result.best_value <= sphere(np.array(x0))


def test_warm_start_validation():
    with pytest.raises(ValueError):
        minimize(sphere, BOX3, x0=(0.0, 0.0))  # wrong dimension
    with pytest.raises(ValueError):
        minimize(sphere, BOX3, x0=(5.0, 0.0, 0.0))  # on the boundary
    with pytest.raises(ValueError):
        minimize(sphere, BOX3, x0=(9.0, 0.0, 0.0))


def test_nan_objective_treated_as_infeasible():
    def holey(p):
        if p[0] > 1.0:
            return float("nan")
        return sphere(p)

    result = minimize(holey, BOX3, OptimizerConfig(max_evaluations=5_000, seed=8))
    assert np.isfinite(result.best_value)
    assert result.best_value < 1e-6
