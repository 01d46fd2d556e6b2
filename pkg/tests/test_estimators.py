import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from corrviz import CorrelationPCA, MahalanobisGOF, stats
from corrviz.errors import RankDeficient, ValidationError

from .oracles import low_rank_correlation, mahalanobis_sq, random_spd


def test_pca_params_and_clone():
    est = CorrelationPCA(n_components=2, policy="second")
    assert est.get_params() == {"n_components": 2, "policy": "second"}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    assert est.set_params(policy="smallest").policy == "smallest"


def test_pca_fit_attributes(rng):
    cov = random_spd(rng, 6)
    est = CorrelationPCA().fit(cov)
    d = stats.correlation_from_covariance(cov)
    assert est.n_features_in_ == 6
    assert est.components_.shape == (1, 6)
    assert np.allclose(est.eigenvalues_, d.eigenvalues)
    assert est.target_eigenvalue_ == d.eigenvalues[2]
    assert np.allclose(est.remaining_covariance_, est.remaining_correlation_ * np.outer(est.sigma_, est.sigma_))
    assert np.allclose(est.conditional_sigma_, stats.conditional_sigmas(cov))


def test_pca_transform(rng):
    cov = random_spd(rng, 4)
    est = CorrelationPCA(n_components=2).fit(cov)
    r = rng.standard_normal((3, 4))
    z = est.transform(r)
    assert z.shape == (3, 2)
    assert np.allclose(z, (r / est.sigma_) @ est.components_.T)
    with pytest.raises(ValueError, match="features"):
        est.transform(np.ones((1, 3)))


def test_pca_not_fitted():
    with pytest.raises(NotFittedError):
        CorrelationPCA().transform(np.ones((1, 3)))


def test_pca_rejects_bad_input(rng):
    with pytest.raises(ValidationError):
        CorrelationPCA().fit(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(RankDeficient):
        CorrelationPCA(policy="smallest").fit(low_rank_correlation(rng, 5, 2))
    with pytest.raises(ValueError):
        CorrelationPCA(policy="nope").fit(np.eye(3))


def test_gof_estimator(rng):
    cov = random_spd(rng, 5)
    y = rng.standard_normal(5)
    models = rng.standard_normal((3, 5))
    est = MahalanobisGOF().fit(y, cov)
    scores = est.score_samples(models)
    assert scores == pytest.approx([mahalanobis_sq(y - m, cov) for m in models], rel=1e-9)
    assert np.all((est.p_values(models) >= 0) & (est.p_values(models) <= 1))
    assert np.allclose(est.gradient(models)[0], stats.mdistance_gradient(y, models[0], cov))
    reports = est.report(models, names=["a", "b", "c"])
    assert [r.name for r in reports] == ["a", "b", "c"]
    assert reports[1].d2 == pytest.approx(scores[1])


def test_gof_estimator_shape_checks(rng):
    est = MahalanobisGOF().fit(np.zeros(3), np.eye(3))
    with pytest.raises(ValueError, match="expected 3"):
        est.score_samples(np.zeros((1, 4)))
    with pytest.raises(NotFittedError):
        MahalanobisGOF().score_samples(np.zeros((1, 3)))
    with pytest.raises(ValidationError):
        MahalanobisGOF().fit(np.zeros(3), np.eye(2))
