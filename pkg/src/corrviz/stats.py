"""Covariance statistics for data with correlated uncertainties.

Covers the correlation decomposition and principal-component reduction,
pairwise and global conditional quantities, the Mahalanobis goodness of fit
and the locally scaled M-distance gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from corrviz import linalg
from corrviz.errors import RankDeficient, ValidationError, ZeroGradient, ZeroVariance
from corrviz.linalg import EigenDecomposition
from corrviz.validation import (
    check_covariance,
    check_strictly_increasing,
    check_vector,
)

POLICIES = ("second", "median", "smallest")

#: Eigenvalues within this relative distance of each other count as equal.
DEGENERATE_RTOL = 1e-12
#: Smallest correlation eigenvalue below this fraction of the largest is singular.
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class DataSet:
    """Measured points with their full covariance and optional model curves.

    ``models`` is a tuple of ``(name, values)`` pairs in display order.
    Construction validates every invariant and raises ValidationError.
    """

    x: np.ndarray
    y: np.ndarray
    cov: np.ndarray
    models: tuple = ()
    labels: tuple | None = None
    x_label: str | None = None
    y_label: str | None = None

    def __post_init__(self):
        x = check_strictly_increasing(self.x, "x")
        n = x.shape[0]
        if n < 1:
            raise ValidationError("dataset needs at least one point")
        y = check_vector(self.y, "y", n)
        cov = check_covariance(self.cov, n)
        models = []
        names = set()
        for k, entry in enumerate(self.models):
            name, values = entry
            name = str(name)
            if name in names:
                raise ValidationError(f"models[{k}]: duplicate model name {name!r}")
            names.add(name)
            models.append((name, check_vector(values, f"models[{k}] ({name})", n)))
        labels = self.labels
        if labels is not None:
            labels = tuple(str(v) for v in labels)
            if len(labels) != n:
                raise ValidationError(f"labels has {len(labels)} entries, expected {n}")
        for attr, value in (("x", x), ("y", y), ("cov", cov)):
            value.setflags(write=False)
            object.__setattr__(self, attr, value)
        for _, values in models:
            values.setflags(write=False)
        object.__setattr__(self, "models", tuple(models))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    @property
    def model_names(self) -> list[str]:
        return [name for name, _ in self.models]

    def model(self, key) -> np.ndarray:
        """Model values by name or position."""
        if isinstance(key, str):
            for name, values in self.models:
                if name == key:
                    return values
            raise KeyError(f"no model named {key!r}")
        return self.models[key][1]

    def __eq__(self, other):
        if not isinstance(other, DataSet):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.cov, other.cov)
            and len(self.models) == len(other.models)
            and all(
                a[0] == b[0] and np.array_equal(a[1], b[1])
                for a, b in zip(self.models, other.models)
            )
            and self.labels == other.labels
            and self.x_label == other.x_label
            and self.y_label == other.y_label
        )

    __hash__ = None


@dataclass(frozen=True)
class CorrelationDecomposition:
    """``C = W^-1 V W^-1`` with ``W = diag(sigma)`` and the eigenpairs of ``C``.

    Eigenvectors are sign-normalized: the largest-magnitude element of each
    is positive.
    """

    correlation: np.ndarray
    sigma: np.ndarray
    eigen: EigenDecomposition

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigen.values

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eigen.vectors

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


@dataclass(frozen=True)
class ReducedCovariance:
    """Remaining correlation ``K`` after removing scaled leading components."""

    remaining: np.ndarray
    n_components: int
    scale_sq: np.ndarray
    policy: str
    target_eigenvalue: float
    contributions: tuple = field(repr=False)


@dataclass(frozen=True)
class GofReport:
    """Squared M-distance, degrees of freedom and p-value of one model."""

    d2: float
    dof: int
    p_value: float
    name: str | None = None
    gradient: np.ndarray | None = field(default=None, compare=False)
    gradient_endpoint_d2: float | None = None

    def to_dict(self) -> dict:
        out = {"d2": self.d2, "dof": self.dof, "p_value": self.p_value}
        if self.name is not None:
            out = {"model": self.name, **out}
        if self.gradient is not None:
            out["gradient"] = [float(g) for g in self.gradient]
        if self.gradient_endpoint_d2 is not None:
            out["gradient_endpoint_d2"] = self.gradient_endpoint_d2
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GofReport":
        gradient = data.get("gradient")
        return cls(
            d2=float(data["d2"]),
            dof=int(data["dof"]),
            p_value=float(data["p_value"]),
            name=data.get("model"),
            gradient=None if gradient is None else np.asarray(gradient, dtype=float),
            gradient_endpoint_d2=data.get("gradient_endpoint_d2"),
        )


@dataclass(frozen=True)
class GradientStep:
    """Result of the line search along the descent direction ``-g``."""

    step: float
    endpoint: np.ndarray
    endpoint_d2: float


def normalize_signs(vectors) -> np.ndarray:
    """Flip each column so its largest-magnitude element is positive.

    Magnitudes equal to within 1e-12 relative count as ties, resolved to
    the lowest index.
    """
    vectors = np.array(vectors, dtype=float)
    for k in range(vectors.shape[1]):
        mag = np.abs(vectors[:, k])
        lead = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-12))[0])
        if vectors[lead, k] < 0:
            vectors[:, k] = -vectors[:, k]
    return vectors


def correlation_from_covariance(cov) -> CorrelationDecomposition:
    v = linalg.as_symmetric(cov)
    diag = np.diag(v)
    bad = np.flatnonzero(diag <= 0)
    if bad.size:
        i = bad[0]
        raise ZeroVariance(f"variance [{i}][{i}] = {float(diag[i])!r}; correlation undefined")
    sigma = np.sqrt(diag)
    c = v / np.outer(sigma, sigma)
    np.fill_diagonal(c, 1.0)
    eigen = linalg.eigh_symmetric(c)
    eigen = EigenDecomposition(eigen.values, normalize_signs(eigen.vectors))
    return CorrelationDecomposition(c, sigma, eigen)


def scale_factor(lambda1: float, lambda_target: float) -> float:
    """Fraction ``s^2`` of the leading component to remove: ``1 - target/lambda1``."""
    if not lambda1 > 0:
        raise ValueError(f"leading eigenvalue must be positive, got {lambda1}")
    if lambda_target - lambda1 > DEGENERATE_RTOL * lambda1:
        raise ValueError(
            f"target eigenvalue {lambda_target} exceeds the component eigenvalue {lambda1}"
        )
    return min(1.0, max(0.0, 1.0 - lambda_target / lambda1))


def target_eigenvalue(values, policy: str, n_components: int = 1) -> float:
    """Pick the eigenvalue the kept components are scaled down to.

    ``second`` is the first eigenvalue not kept (lambda_2 for a single
    component), ``median`` is the median of the spectrum (the larger middle
    value for even N), ``smallest`` is lambda_N.
    """
    values = np.asarray(values)
    n = values.shape[0]
    if policy == "second":
        return float(values[n_components])
    if policy == "median":
        return float(values[(n - 1) // 2])
    if policy == "smallest":
        if values[-1] <= RANK_RTOL * values[0]:
            raise RankDeficient(
                f"smallest eigenvalue {values[-1]:.3g} is zero; policy 'smallest' "
                "needs a correlation matrix of full rank"
            )
        return float(values[-1])
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def reduce_components(
    decomp: CorrelationDecomposition, n_components: int = 1, policy: str = "median"
) -> ReducedCovariance:
    """Scale the leading ``n_components`` down to a common target eigenvalue.

    Returns ``K = C - sum_k s_k^2 lambda_k u_k u_k^T`` with
    ``s_k^2 = 1 - target/lambda_k``, so each removed component is left with
    exactly the target eigenvalue.
    """
    n = decomp.n
    if not 1 <= n_components < n:
        raise ValueError(f"n_components must be in [1, {n - 1}], got {n_components}")
    values = decomp.eigenvalues
    vectors = decomp.eigenvectors
    target = target_eigenvalue(values, policy, n_components)

    scale_sq = np.empty(n_components)
    contributions = []
    remaining = decomp.correlation.copy()
    for k in range(n_components):
        lam = values[k]
        # degenerate spectrum: nothing to remove
        s2 = 0.0 if abs(lam - target) <= DEGENERATE_RTOL * lam else scale_factor(lam, target)
        u = vectors[:, k]
        part = s2 * lam * np.outer(u, u)
        scale_sq[k] = s2
        contributions.append(part)
        remaining -= part
    remaining = 0.5 * (remaining + remaining.T)
    return ReducedCovariance(
        remaining, n_components, scale_sq, policy, target, tuple(contributions)
    )


def remaining_covariance(sigma, remaining) -> np.ndarray:
    """``W K W``: the remaining correlation mapped back to data units."""
    sigma = np.asarray(sigma, dtype=float)
    return np.asarray(remaining, dtype=float) * np.outer(sigma, sigma)


def pairwise_conditional_mean_shift(sigma_i, rho_ij, delta_yj, sigma_j) -> float:
    """Shift of E[y_i] when y_j is fixed ``delta_yj`` away from its expectation."""
    return sigma_i * rho_ij * delta_yj / sigma_j


def pairwise_conditional_variance(sigma_i, rho_ij) -> float:
    return sigma_i**2 * (1.0 - rho_ij**2)


def conditional_sigmas(cov) -> np.ndarray:
    """Standard deviation of each point with all other points held fixed."""
    precision = linalg.inverse_spd(cov)
    return 1.0 / np.sqrt(np.diag(precision))


def conditional_pair_covariance(cov, i: int, j: int) -> np.ndarray:
    """2x2 covariance of points ``i`` and ``j`` given all other points."""
    precision = linalg.inverse_spd(cov)
    n = precision.shape[0]
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"need two distinct indices in [0, {n}), got ({i}, {j})")
    idx = [i, j]
    return linalg.inverse_spd(precision[np.ix_(idx, idx)])


def _residual(y, m):
    y = np.asarray(y, dtype=float)
    m = np.asarray(m, dtype=float)
    if y.shape != m.shape or y.ndim != 1:
        raise ValueError(f"data and model shapes differ: {y.shape} vs {m.shape}")
    return y - m


def mahalanobis_sq(y, m, cov) -> float:
    """Squared M-distance ``(y - m)^T V^-1 (y - m)``, via a Cholesky solve."""
    r = _residual(y, m)
    z = linalg.solve_lower(linalg.cholesky(cov), r)
    return float(z @ z)


def gof(y, m, cov, name: str | None = None, with_gradient: bool = False) -> GofReport:
    d2 = mahalanobis_sq(y, m, cov)
    dof = len(y)
    gradient = endpoint_d2 = None
    if with_gradient:
        gradient = mdistance_gradient(y, m, cov)
        if np.any(gradient != 0):
            endpoint_d2 = scale_gradient(y, m, cov, gradient).endpoint_d2
        else:
            endpoint_d2 = d2
    return GofReport(d2, dof, linalg.chi2_sf(d2, dof), name, gradient, endpoint_d2)


def mdistance_gradient(y, m, cov) -> np.ndarray:
    """Gradient of the squared M-distance with respect to the model: ``-2 V^-1 (y - m)``."""
    r = _residual(y, m)
    return -2.0 * linalg.cho_solve(linalg.cholesky(cov), r)


def scale_gradient(y, m, cov, gradient) -> GradientStep:
    """Move the model along ``-gradient`` to the point of smallest M-distance.

    The optimal step is ``t* = d^T V^-1 r / d^T V^-1 d`` for ``d = -gradient``.
    """
    r = _residual(y, m)
    g = np.asarray(gradient, dtype=float)
    L = linalg.cholesky(cov)
    sigma = np.sqrt(np.diag(cov))
    if np.linalg.norm(g * sigma) <= 1e-12:
        raise ZeroGradient("M-distance gradient is zero; the model already matches the data")
    d = -g
    zd = linalg.solve_lower(L, d)
    zr = linalg.solve_lower(L, r)
    t = float(zd @ zr) / float(zd @ zd)
    # written as y - (r - t d) so the endpoint is exactly y when t d == r
    endpoint = np.asarray(y, dtype=float) - (r - t * d)
    return GradientStep(t, endpoint, mahalanobis_sq(y, endpoint, cov))


def correlation_of(cov) -> np.ndarray:
    """Plain correlation matrix of a covariance (no eigendecomposition)."""
    cov = np.asarray(cov, dtype=float)
    s = np.sqrt(np.diag(cov))
    c = cov / np.outer(s, s)
    np.fill_diagonal(c, 1.0)
    return c


def reduce_covariance(cov, n_components: int = 1, policy: str = "median"):
    """Convenience: decomposition, reduction and remaining covariance in one call."""
    decomp = correlation_from_covariance(cov)
    if decomp.n < 2:
        return decomp, None, np.asarray(cov, dtype=float)
    reduced = reduce_components(decomp, n_components, policy)
    return decomp, reduced, remaining_covariance(decomp.sigma, reduced.remaining)
