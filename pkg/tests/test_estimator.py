import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sectorshift.estimator import (
    CollapseTransformer,
    ThreeSectorTransferModel,
    validate_g,
    validate_shares,
)
from sectorshift.model import UnclassifiableParamsError, collapse_transform, shares_curve
from sectorshift.pipeline import synth_generate
from tests.conftest import FIN, PAK


@pytest.fixture
def fin_data(fin):
    series = synth_generate(fin, np.linspace(8.8, 10.6, 26))
    return series.g, series.shares


# ---------------------------------------------------------------- validation


def test_validate_g_shapes():
    np.testing.assert_array_equal(validate_g([1.0, 2.0]), [1.0, 2.0])
    np.testing.assert_array_equal(validate_g([[1.0], [2.0]]), [1.0, 2.0])
    with pytest.raises(ValueError):
        validate_g([[1.0, 2.0]])
    with pytest.raises(ValueError):
        validate_g([])
    with pytest.raises(ValueError):
        validate_g([1.0, np.inf])


def test_validate_shares_contract():
    ok = validate_shares([[0.5, 0.3, 0.2]])
    assert ok.shape == (1, 3)
    with pytest.raises(ValueError, match="shape"):
        validate_shares([[0.5, 0.5]])
    with pytest.raises(ValueError, match="renormalize"):
        validate_shares([[0.5, 0.3, 0.1]])
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        validate_shares([[1.2, -0.4, 0.2]])
    with pytest.raises(ValueError, match="2 rows"):
        validate_shares([[0.5, 0.3, 0.2]], n_rows=2)


# ---------------------------------------------------------------- regressor


def test_fit_recovers_parameters(fin, fin_data):
    g, shares = fin_data
    est = ThreeSectorTransferModel().fit(g, shares)
    assert est.k1_ == pytest.approx(fin.k1, abs=1e-3)
    assert est.k2_ == pytest.approx(fin.k2, abs=1e-3)
    assert est.alpha_ == pytest.approx(fin.alpha, abs=1e-3)
    assert est.g0_ == pytest.approx(fin.g0, abs=1e-3)
    assert est.accepted_
    assert est.transfer_type_.id == 1
    assert est.g_max_industry_ == pytest.approx(9.708, abs=0.01)
    assert est.n_evaluations_ > 0
    assert est.n_features_in_ == 1


def test_predict_evaluates_fitted_curves(fin_data):
    g, shares = fin_data
    est = ThreeSectorTransferModel().fit(g, shares)
    pred = est.predict([9.0, 10.0])
    np.testing.assert_allclose(pred, shares_curve(est.params_, [9.0, 10.0]), atol=0)
    np.testing.assert_allclose(pred.sum(axis=1), 1.0, atol=1e-12)
    # column input is the sklearn-native layout
    np.testing.assert_array_equal(est.predict(np.array([[9.0], [10.0]])), pred)


def test_score_is_negative_summed_mse(fin_data):
    g, shares = fin_data
    est = ThreeSectorTransferModel().fit(g, shares)
    assert est.score(g, shares) == -est.mse_sum_
    assert est.score(g, shares) > -1e-12


def test_fit_is_deterministic(fin_data):
    g, shares = fin_data
    a = ThreeSectorTransferModel(random_state=3).fit(g, shares)
    b = ThreeSectorTransferModel(random_state=3).fit(g, shares)
    assert a.params_ == b.params_
    assert a.n_evaluations_ == b.n_evaluations_


def test_fit_input_validation(fin_data):
    g, shares = fin_data
    est = ThreeSectorTransferModel()
    with pytest.raises(ValueError):
        est.fit(np.column_stack([g, g]), shares)
    with pytest.raises(ValueError):
        est.fit(g, shares[:, :2])
    with pytest.raises(ValueError):
        est.fit(g, shares[:-1])
    bad = shares.copy()
    bad[0, 0] += 0.01
    with pytest.raises(ValueError, match="renormalize"):
        est.fit(g, bad)


def test_unfitted_estimator_refuses_to_predict():
    with pytest.raises(NotFittedError):
        ThreeSectorTransferModel().predict([9.0])


def test_sklearn_param_plumbing(fin_data):
    est = ThreeSectorTransferModel(max_evaluations=9_000, random_state=7)
    params = est.get_params()
    assert params["max_evaluations"] == 9_000
    assert params["k2_bounds"] == (-5.0, 5.0)
    est.set_params(acceptance_threshold=0.2)
    assert est.acceptance_threshold == 0.2

    g, shares = fin_data
    est.fit(g, shares)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert not hasattr(twin, "params_")  # clones start unfitted


def test_bounds_constrain_the_search(fin_data):
    g, shares = fin_data
    est = ThreeSectorTransferModel(k2_bounds=(0.0, 1.0), g0_bounds=(8.0, 9.5)).fit(g, shares)
    assert 0.0 <= est.k2_ <= 1.0
    assert 8.0 <= est.g0_ <= 9.5


# ---------------------------------------------------------------- transformer


def test_transformer_matches_plain_transform(fin):
    curve = shares_curve(fin, np.linspace(8.8, 10.6, 9))
    pairs = curve[:, :2]
    out = CollapseTransformer(k1=fin.k1, k2=fin.k2, alpha=fin.alpha).fit_transform(pairs)
    x, y = collapse_transform(fin, pairs[:, 0], pairs[:, 1])
    np.testing.assert_array_equal(out, np.column_stack([x, y]))
    np.testing.assert_allclose(out[:, 1], out[:, 0], atol=1e-12)


def test_transformer_display_mode(pak):
    curve = shares_curve(pak, np.linspace(8.2, 10.2, 9))
    t = CollapseTransformer(k1=pak.k1, k2=pak.k2, alpha=pak.alpha, display=True).fit(None)
    out = t.transform(curve[:, :2])
    assert np.all(np.isfinite(out))
    # the boundary point sits at the origin, outside the log flip's domain
    undefined = t.transform([[1.0, 0.0]])
    assert np.all(np.isnan(undefined))


def test_transformer_display_requires_classifiable_parameters():
    with pytest.raises(UnclassifiableParamsError):
        CollapseTransformer(k1=1.0, k2=0.5, alpha=1.0, display=True).fit(None)
    # without display the same parameters are fine
    CollapseTransformer(k1=1.0, k2=0.5, alpha=1.0).fit(None)


def test_transformer_validation(fin):
    t = CollapseTransformer(k1=fin.k1, k2=fin.k2, alpha=fin.alpha)
    with pytest.raises(NotFittedError):
        t.transform([[0.5, 0.2]])
    t.fit(None)
    with pytest.raises(ValueError):
        t.transform([[0.5, 0.2, 0.3]])
    assert clone(t).get_params() == t.get_params()
