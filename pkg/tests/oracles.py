"""Independent reference computations used to check corrviz results.

Everything here uses numpy/scipy directly and shares no code with the
package under test.
"""

import math

import numpy as np
from scipy import integrate


def random_spd(rng, n, condition=1e3):
    """Random SPD covariance with varied scales and a bounded condition number."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    spectrum = np.exp(rng.uniform(0.0, math.log(condition), n))
    a = (q * spectrum) @ q.T
    scales = np.exp(rng.uniform(-2.0, 2.0, n))
    return 0.5 * (a + a.T) * np.outer(scales, scales)


def low_rank_correlation(rng, n, rank):
    f = rng.standard_normal((n, rank))
    cov = f @ f.T
    s = np.sqrt(np.diag(cov))
    return cov / np.outer(s, s)


def schur_conditional_variance(cov, i):
    """var[y_i | all other y] from the Schur complement of the other block."""
    rest = [k for k in range(cov.shape[0]) if k != i]
    if not rest:
        return cov[i, i]
    b = cov[i, rest]
    return cov[i, i] - b @ np.linalg.solve(cov[np.ix_(rest, rest)], b)


def mahalanobis_sq(r, cov):
    return float(r @ np.linalg.solve(cov, r))


def chi2_pdf(x, k):
    if x <= 0:
        return 0.0
    return math.exp((k / 2 - 1) * math.log(x) - x / 2 - (k / 2) * math.log(2) - math.lgamma(k / 2))


def chi2_sf_quad(d2, k):
    """Upper tail by numerically integrating the density over [0, d2]."""
    head, _ = integrate.quad(chi2_pdf, 0.0, d2, args=(k,), epsabs=1e-13, epsrel=1e-13, limit=200)
    return 1.0 - head


def line_scan_min(y, m, direction, cov, t_lo, t_hi, points=10_000):
    """Smallest squared M-distance of ``m + t*direction`` over a uniform grid of t."""
    ts = np.linspace(t_lo, t_hi, points)
    r = y[None, :] - (m[None, :] + ts[:, None] * direction[None, :])
    prec = np.linalg.inv(cov)
    d2 = np.einsum("ti,ij,tj->t", r, prec, r)
    k = int(np.argmin(d2))
    return float(d2[k]), float(ts[k]), float(ts[1] - ts[0])


def ellipse_quadratic_form(points, cov2):
    prec = np.linalg.inv(cov2)
    return np.einsum("ti,ij,tj->t", points, prec, points)
