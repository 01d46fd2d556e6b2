"""Dense symmetric-matrix kernel.

Everything here works on small dense ``numpy`` arrays (n up to a few
hundred). The eigensolver is a cyclic Jacobi sweep, which is slow for large
matrices but accurate to machine precision on the covariance and correlation
matrices this package deals with.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from corrviz.errors import ConvergenceError, NotPositiveDefinite

#: Relative asymmetry below which input is silently symmetrized.
SYMMETRY_RTOL = 1e-9
#: Jacobi stops once off(A) <= JACOBI_TOL * ||A||_F.
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
#: Cholesky pivots must exceed this times the largest diagonal element.
PIVOT_RTOL = 1e-12

_EPS = 1e-16
_TINY = 1e-300


class EigenDecomposition(NamedTuple):
    """Eigenpairs sorted by descending eigenvalue.

    ``vectors[:, k]`` is the unit eigenvector belonging to ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def as_symmetric(m, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Return ``m`` as an exactly symmetric float array.

    Asymmetry up to ``rtol`` times the largest absolute entry is averaged
    away; anything larger is rejected.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise ValueError(f"matrix element [{i}][{j}] is not finite")
    diff = np.abs(a - a.T)
    scale = np.max(np.abs(a))
    if diff.max() > rtol * scale:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        raise ValueError(
            f"matrix is not symmetric: element [{i}][{j}] = {float(a[i, j])!r} "
            f"but [{j}][{i}] = {float(a[j, i])!r}"
        )
    return 0.5 * (a + a.T)


def eigh_symmetric(m, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Eigenvalues come back in descending order. Equal eigenvalues keep the
    order in which Jacobi left them on the diagonal, so output is
    deterministic for identical input.

    Raises
    ------
    ConvergenceError
        If the off-diagonal norm has not dropped below tolerance after
        ``max_sweeps`` full sweeps.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    v = np.eye(n)
    threshold = JACOBI_TOL * np.linalg.norm(a)

    for _ in range(max_sweeps + 1):
        off = math.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                # already zero at working precision
                if abs(apq) <= _EPS * 0.5 * (abs(a[p, p]) + abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                _rotate(a, v, p, q, c, s)
    else:
        raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def _rotate(a, v, p, q, c, s):
    # A <- J^T A J with J = [[c, s], [-s, c]] embedded at (p, q)
    ap = a[:, p].copy()
    aq = a[:, q]
    a[:, p] = c * ap - s * aq
    a[:, q] = s * ap + c * aq
    rp = a[p, :].copy()
    rq = a[q, :]
    a[p, :] = c * rp - s * rq
    a[q, :] = s * rp + c * rq
    a[p, q] = a[q, p] = 0.0
    vp = v[:, p].copy()
    vq = v[:, q]
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def cholesky(m, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    Raises NotPositiveDefinite when a pivot falls to ``rtol`` times the
    largest diagonal element or below.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    tol = rtol * max(np.max(np.diag(a)), 0.0)
    L = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol:
            raise NotPositiveDefinite(
                f"matrix is not positive definite (pivot {j} is {pivot:.3g})"
            )
        L[j, j] = math.sqrt(pivot)
        L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L: np.ndarray, b) -> np.ndarray:
    """Forward substitution for ``L x = b``; ``b`` may be a vector or matrix."""
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    for i in range(L.shape[0]):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper(U: np.ndarray, b) -> np.ndarray:
    """Back substitution for ``U x = b``."""
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b)
    for i in range(U.shape[0] - 1, -1, -1):
        x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def cho_solve(L: np.ndarray, b) -> np.ndarray:
    """Solve ``(L L^T) x = b`` given the Cholesky factor ``L``."""
    return solve_upper(L.T, solve_lower(L, b))


def inverse_spd(m) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    L = cholesky(m)
    linv = solve_lower(L, np.eye(L.shape[0]))
    inv = linv.T @ linv
    return 0.5 * (inv + inv.T)


def is_psd(m, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol`` times the largest."""
    values = eigh_symmetric(m).values
    return bool(values[-1] >= -tol * values[0])


def chi2_sf(d2: float, dof: int) -> float:
    """Chi-squared survival function ``P(X >= d2)`` for ``dof`` degrees of freedom.

    Computed as the regularized upper incomplete gamma ``Q(dof/2, d2/2)``.
    """
    if d2 < 0 or math.isnan(d2):
        raise ValueError(f"squared distance must be non-negative, got {d2}")
    if int(dof) != dof or dof < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {dof}")
    if math.isinf(d2):
        return 0.0
    return gammaincc(0.5 * dof, 0.5 * d2)


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x) for a > 0, x >= 0."""
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_contfrac(a, x))


def _prefactor(a, x):
    # x^a e^-x / Gamma(a), in log space to avoid overflow
    return math.exp(a * math.log(x) - x - math.lgamma(a))


def _gamma_series(a, x, max_iter=10_000):
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * _prefactor(a, x)
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_contfrac(a, x, max_iter=10_000):
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _prefactor(a, x)
    raise ConvergenceError(f"incomplete gamma fraction did not converge (a={a}, x={x})")
