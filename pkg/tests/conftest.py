import pathlib

import numpy as np
import pytest

from sectorshift.model import ModelParams

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

# Reference parameter sets used throughout: an early-stage economy still
# gaining industry share (type 3), a mid-transition one (type 1) and a
# late-stage service economy (type 2).
PAK = ModelParams(k1=0.56, k2=-0.01, alpha=0.32, g0=8.12)
FIN = ModelParams(k1=2.29, k2=0.35, alpha=0.50, g0=8.74)
USA = ModelParams(k1=1.76, k2=0.94, alpha=1.27, g0=5.02)


@pytest.fixture
def pak():
    return PAK


@pytest.fixture
def fin():
    return FIN


@pytest.fixture
def usa():
    return USA


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def bounded_param_draws(rng, n, g_span=5.0, n_grid=50):
    """Draw (params, g_grid) pairs on which absolute tolerances make sense.

    Unrestricted coefficients let the analytic shares blow up to 1e30 where
    a 1e-10 absolute comparison is meaningless, so draws are rejected until
    every share magnitude and the e**(-k2*dg) factor stay below 10 on the
    grid.
    """
    from sectorshift.model import shares_curve

    out = []
    while len(out) < n:
        k1 = rng.uniform(-3.0, 3.0)
        k2 = rng.uniform(-3.0, 3.0)
        alpha = rng.uniform(0.05, 3.0)
        g0 = rng.uniform(2.0, 12.0)
        if abs(k1) < 0.05 or abs(k2) < 0.05 or abs(k1 - k2) < 1e-6:
            continue
        params = ModelParams(k1=k1, k2=k2, alpha=alpha, g0=g0)
        g_grid = np.linspace(g0, g0 + g_span, n_grid)
        curve = shares_curve(params, g_grid)
        if not np.all(np.isfinite(curve)) or np.abs(curve).max() > 10.0:
            continue
        if np.exp(-k2 * (g_grid - g0)).max() > 10.0:
            continue
        out.append((params, g_grid))
    return out
