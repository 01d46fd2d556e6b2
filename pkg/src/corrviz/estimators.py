"""scikit-learn compatible wrappers around the covariance statistics.

Both estimators are fitted on a *covariance matrix* rather than on a sample
matrix, because the inputs here are published measurements with a known
covariance, not draws to estimate one from.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from corrviz import linalg, stats
from corrviz.validation import check_covariance, check_vector


class CorrelationPCA(TransformerMixin, BaseEstimator):
    """Principal components of a correlation matrix with leading-component reduction.

    Parameters
    ----------
    n_components : int, default=1
        Number of leading components to scale down.
    policy : {"second", "median", "smallest"}, default="median"
        Which eigenvalue the kept components are scaled down to.

    Attributes
    ----------
    sigma_ : ndarray of shape (n_features,)
        Marginal standard deviations.
    correlation_ : ndarray of shape (n_features, n_features)
    eigenvalues_ : ndarray of shape (n_features,)
        Correlation eigenvalues, descending.
    components_ : ndarray of shape (n_components, n_features)
        Sign-normalized leading eigenvectors.
    scale_sq_ : ndarray of shape (n_components,)
    target_eigenvalue_ : float
    remaining_correlation_ : ndarray of shape (n_features, n_features)
    remaining_covariance_ : ndarray of shape (n_features, n_features)
    conditional_sigma_ : ndarray of shape (n_features,)
    """

    def __init__(self, n_components=1, policy="median"):
        self.n_components = n_components
        self.policy = policy

    def fit(self, X, y=None):
        """Fit on a covariance matrix ``X`` of shape (n_features, n_features)."""
        cov = check_covariance(check_array(X, ensure_min_samples=2, ensure_min_features=2))
        decomp = stats.correlation_from_covariance(cov)
        reduced = stats.reduce_components(decomp, self.n_components, self.policy)
        self.decomposition_ = decomp
        self.reduction_ = reduced
        self.sigma_ = decomp.sigma
        self.correlation_ = decomp.correlation
        self.eigenvalues_ = decomp.eigenvalues
        self.components_ = decomp.eigenvectors[:, : self.n_components].T
        self.scale_sq_ = reduced.scale_sq
        self.target_eigenvalue_ = reduced.target_eigenvalue
        self.remaining_correlation_ = reduced.remaining
        self.remaining_covariance_ = stats.remaining_covariance(decomp.sigma, reduced.remaining)
        self.conditional_sigma_ = stats.conditional_sigmas(cov)
        self.n_features_in_ = cov.shape[0]
        return self

    def transform(self, X):
        """Project residual vectors onto the leading correlation components.

        Rows of ``X`` are residuals ``y - m``; they are standardized by
        ``sigma_`` before projection.
        """
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return (X / self.sigma_) @ self.components_.T


class MahalanobisGOF(BaseEstimator):
    """Goodness of fit of model predictions to correlated data.

    ``fit(X, cov)`` stores the measured values ``X`` (one vector) and their
    covariance. The scoring methods take model predictions, one per row.
    """

    def fit(self, X, cov):
        X = check_vector(np.ravel(check_array(X, ensure_2d=False)), "X")
        cov = check_covariance(cov, X.shape[0])
        self.data_ = X
        self.covariance_ = cov
        self.cholesky_ = linalg.cholesky(cov)
        self.n_features_in_ = X.shape[0]
        return self

    def _models(self, M):
        check_is_fitted(self)
        M = check_array(M)
        if M.shape[1] != self.n_features_in_:
            raise ValueError(f"models have {M.shape[1]} values, expected {self.n_features_in_}")
        return M

    def score_samples(self, M):
        """Squared M-distance of each model row."""
        M = self._models(M)
        z = linalg.solve_lower(self.cholesky_, (self.data_ - M).T)
        return np.sum(z * z, axis=0)

    def p_values(self, M):
        dof = self.n_features_in_
        return np.array([linalg.chi2_sf(d2, dof) for d2 in self.score_samples(M)])

    def gradient(self, M):
        """Gradient of the squared M-distance with respect to each model row."""
        M = self._models(M)
        return (-2.0 * linalg.cho_solve(self.cholesky_, (self.data_ - M).T)).T

    def report(self, M, names=None, with_gradient=False):
        M = self._models(M)
        names = names if names is not None else [None] * M.shape[0]
        return [
            stats.gof(self.data_, m, self.covariance_, name, with_gradient)
            for m, name in zip(M, names)
        ]
