import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrviz import stats
from corrviz.errors import RankDeficient, ValidationError, ZeroGradient, ZeroVariance
from corrviz.stats import DataSet, GofReport

from .oracles import low_rank_correlation, mahalanobis_sq, random_spd, schur_conditional_variance


def _dataset(n=4, **kw):
    cov = np.eye(n) * 0.25
    return DataSet(np.arange(1.0, n + 1), np.ones(n), cov, **kw)


class TestDataSet:
    def test_arrays_are_read_only(self):
        ds = _dataset(models=(("m", np.zeros(4)),))
        with pytest.raises(ValueError):
            ds.y[0] = 2.0
        with pytest.raises(ValueError):
            ds.model("m")[0] = 1.0

    def test_equality_and_lookup(self):
        a = _dataset(models=(("m", np.zeros(4)),))
        b = _dataset(models=(("m", np.zeros(4)),))
        assert a == b
        assert a.model("m") is a.model(0)
        assert a.model_names == ["m"]
        assert a != _dataset()
        with pytest.raises(KeyError):
            a.model("other")

    @pytest.mark.parametrize(
        "kw, match",
        [
            (dict(x=[1.0, 1.0, 2.0]), "strictly increasing"),
            (dict(y=[1.0, 2.0]), "y has 2 values"),
            (dict(cov=np.diag([1.0, 0.0, 1.0])), r"\[1\]\[1\]"),
            (dict(cov=[[1.0, 2.0, 0], [2.0, 1.0, 0], [0, 0, 1.0]]), "eigenvalue"),
            (dict(models=(("a", [1.0, 2, 3]), ("a", [1.0, 2, 3]))), "duplicate"),
            (dict(y=[1.0, np.inf, 2.0]), "not finite"),
            (dict(labels=("a",)), "labels"),
        ],
    )
    def test_invalid_inputs(self, kw, match):
        base = dict(x=[1.0, 2.0, 3.0], y=[1.0, 2.0, 3.0], cov=np.eye(3))
        base.update(kw)
        with pytest.raises(ValidationError, match=match):
            DataSet(**base)


def test_correlation_decomposition(rng):
    cov = random_spd(rng, 6)
    d = stats.correlation_from_covariance(cov)
    assert np.allclose(np.diag(d.correlation), 1.0)
    assert np.allclose(d.correlation * np.outer(d.sigma, d.sigma), cov)
    assert np.allclose((d.eigenvectors * d.eigenvalues) @ d.eigenvectors.T, d.correlation, atol=1e-12)
    assert d.eigenvalues.sum() == pytest.approx(6, abs=1e-9)
    lead = np.abs(d.eigenvectors).argmax(axis=0)
    assert np.all(d.eigenvectors[lead, range(6)] > 0)


def test_zero_variance():
    with pytest.raises(ZeroVariance):
        stats.correlation_from_covariance(np.diag([1.0, 0.0]))


def test_sign_tie_goes_to_lowest_index():
    v = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2)
    out = stats.normalize_signs(v)
    assert out[0, 0] > 0 and out[0, 1] > 0


@pytest.mark.parametrize(
    "policy, n_comp, expected",
    [("second", 1, 4.0), ("second", 2, 3.0), ("median", 1, 3.0), ("smallest", 1, 1.0)],
)
def test_target_eigenvalue(policy, n_comp, expected):
    assert stats.target_eigenvalue(np.array([5.0, 4.0, 3.0, 2.0, 1.0]), policy, n_comp) == expected


def test_median_for_even_n_is_upper_middle():
    assert stats.target_eigenvalue(np.array([4.0, 3.0, 2.0, 1.0]), "median") == 3.0


def test_unknown_policy():
    with pytest.raises(ValueError, match="policy"):
        stats.target_eigenvalue(np.array([2.0, 1.0]), "largest")


def test_scale_factor():
    assert stats.scale_factor(4.0, 1.0) == 0.75
    assert stats.scale_factor(2.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        stats.scale_factor(1.0, 2.0)


def test_reduction_leaves_target_eigenvalue(rng):
    d = stats.correlation_from_covariance(random_spd(rng, 7))
    red = stats.reduce_components(d, 2, "smallest")
    for k in range(2):
        u = d.eigenvectors[:, k]
        assert u @ red.remaining @ u == pytest.approx(red.target_eigenvalue, abs=1e-12)
    assert np.allclose(red.remaining + sum(red.contributions), d.correlation)


def test_reduction_degenerate_spectrum_removes_nothing():
    d = stats.correlation_from_covariance(np.eye(4))
    red = stats.reduce_components(d, 1, "median")
    assert red.scale_sq.tolist() == [0.0]
    assert np.array_equal(red.remaining, np.eye(4))


@pytest.mark.parametrize("n_comp", [0, 3])
def test_reduction_component_range(n_comp):
    d = stats.correlation_from_covariance(np.array([[1.0, 0.5, 0], [0.5, 1, 0], [0, 0, 1]]))
    with pytest.raises(ValueError, match="n_components"):
        stats.reduce_components(d, n_comp)


def test_smallest_policy_rank_deficient(rng):
    d = stats.correlation_from_covariance(low_rank_correlation(rng, 5, 2))
    with pytest.raises(RankDeficient):
        stats.reduce_components(d, 1, "smallest")
    assert stats.reduce_components(d, 1, "median").scale_sq[0] > 0


def test_conditional_sigmas_match_schur(rng):
    cov = random_spd(rng, 6)
    expected = [math.sqrt(schur_conditional_variance(cov, i)) for i in range(6)]
    assert np.allclose(stats.conditional_sigmas(cov), expected, rtol=1e-9)
    assert np.all(stats.conditional_sigmas(cov) <= np.sqrt(np.diag(cov)) * (1 + 1e-12))


def test_conditional_pair_covariance(rng):
    cov = random_spd(rng, 5)
    pair = stats.conditional_pair_covariance(cov, 1, 3)
    rest = [0, 2, 4]
    idx = [1, 3]
    schur = cov[np.ix_(idx, idx)] - cov[np.ix_(idx, rest)] @ np.linalg.solve(
        cov[np.ix_(rest, rest)], cov[np.ix_(rest, idx)]
    )
    assert np.allclose(pair, schur, rtol=1e-9)
    with pytest.raises(IndexError):
        stats.conditional_pair_covariance(cov, 2, 2)


def test_pairwise_conditioning_formulas():
    assert stats.pairwise_conditional_mean_shift(2.0, 0.5, 3.0, 1.5) == pytest.approx(2.0)
    assert stats.pairwise_conditional_variance(2.0, 0.6) == pytest.approx(2.56)


def test_mahalanobis_and_gof(rng):
    cov = random_spd(rng, 5)
    y, m = rng.standard_normal(5), rng.standard_normal(5)
    d2 = stats.mahalanobis_sq(y, m, cov)
    assert d2 == pytest.approx(mahalanobis_sq(y - m, cov), rel=1e-9)
    rep = stats.gof(y, m, cov, "m", with_gradient=True)
    assert (rep.d2, rep.dof, rep.name) == (d2, 5, "m")
    assert 0.0 <= rep.p_value <= 1.0
    assert rep.gradient_endpoint_d2 <= rep.d2


def test_gof_report_round_trip():
    rep = GofReport(1.5, 3, 0.68, "m", np.array([0.5, -1.0, 2.0]), 0.4)
    back = GofReport.from_dict(rep.to_dict())
    assert back == rep
    assert np.array_equal(back.gradient, rep.gradient)
    assert "model" not in GofReport(1.0, 2, 0.6).to_dict()


def test_gradient_matches_finite_differences(rng):
    cov = random_spd(rng, 4, condition=20)
    y, m = rng.standard_normal(4), rng.standard_normal(4)
    g = stats.mdistance_gradient(y, m, cov)
    h = 1e-6
    fd = [
        (stats.mahalanobis_sq(y, m + h * e, cov) - stats.mahalanobis_sq(y, m - h * e, cov)) / (2 * h)
        for e in np.eye(4)
    ]
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-6)


def test_scale_gradient_zero_residual():
    with pytest.raises(ZeroGradient):
        stats.scale_gradient(np.ones(3), np.ones(3), np.eye(3), np.zeros(3))


def test_scale_gradient_identity_hits_data_exactly(rng):
    y = rng.standard_normal(5)
    m = rng.standard_normal(5)
    g = stats.mdistance_gradient(y, m, np.eye(5))
    step = stats.scale_gradient(y, m, np.eye(5), g)
    assert np.array_equal(step.endpoint, y)
    assert step.endpoint_d2 == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_eigenvalues_sum_to_n(n, seed):
    d = stats.correlation_from_covariance(random_spd(np.random.default_rng(seed), n))
    assert d.eigenvalues.sum() == pytest.approx(n, abs=1e-9)
    assert np.all(d.eigenvalues > -1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1), st.sampled_from(stats.POLICIES))
def test_remaining_correlation_stays_psd(n, seed, policy):
    d = stats.correlation_from_covariance(random_spd(np.random.default_rng(seed), n))
    red = stats.reduce_components(d, 1, policy)
    assert np.linalg.eigvalsh(red.remaining).min() >= -1e-10
    assert np.all(np.diag(red.remaining) <= 1 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_d2_is_nonnegative_and_invariant_to_rescaling(n, seed):
    rng = np.random.default_rng(seed)
    cov = random_spd(rng, n, condition=100)
    y, m = rng.standard_normal(n), rng.standard_normal(n)
    d2 = stats.mahalanobis_sq(y, m, cov)
    s = np.exp(rng.uniform(-1, 1, n))
    assert d2 >= 0
    assert stats.mahalanobis_sq(y * s, m * s, cov * np.outer(s, s)) == pytest.approx(d2, rel=1e-8)


def test_two_by_two_second_policy():
    d = stats.correlation_from_covariance(np.array([[1.0, 0.5], [0.5, 1.0]]))
    red = stats.reduce_components(d, 1, "second")
    assert red.scale_sq[0] == pytest.approx(2 / 3)
    assert np.allclose(red.remaining, 0.5 * np.eye(2), atol=1e-12)
