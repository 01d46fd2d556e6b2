"""Input validation helpers.

Each checker returns a clean float array or raises
:class:`~corrviz.errors.ValidationError` naming the offending index.
"""

from __future__ import annotations

import numpy as np

from corrviz import linalg
from corrviz.errors import ValidationError

#: Smallest eigenvalue may dip to -PSD_TOL * largest before a covariance is rejected.
PSD_TOL = 1e-9


def check_vector(v, name: str, n: int | None = None) -> np.ndarray:
    a = np.array(v, dtype=float)
    if a.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValidationError(f"{name} has {a.shape[0]} values, expected {n}")
    bad = np.flatnonzero(~np.isfinite(a))
    if bad.size:
        raise ValidationError(f"{name}[{bad[0]}] is not finite")
    return a


def check_strictly_increasing(x, name: str = "x") -> np.ndarray:
    x = check_vector(x, name)
    steps = np.diff(x)
    bad = np.flatnonzero(steps <= 0)
    if bad.size:
        i = bad[0] + 1
        raise ValidationError(
            f"{name} must be strictly increasing: {name}[{i}] = {float(x[i])!r} "
            f"is not greater than {name}[{i - 1}] = {float(x[i - 1])!r}"
        )
    return x


def check_covariance(
    cov, n: int | None = None, name: str = "covariance", psd_tol: float = PSD_TOL
) -> np.ndarray:
    """Validate a covariance matrix and return it exactly symmetrized.

    Checks shape, finiteness, symmetry (tiny asymmetry is averaged away),
    strictly positive variances and positive semi-definiteness within
    ``psd_tol``.
    """
    a = np.array(cov, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValidationError(f"{name} is {a.shape[0]}x{a.shape[0]}, expected {n}x{n}")
    try:
        a = linalg.as_symmetric(a)
    except ValueError as exc:
        raise ValidationError(f"{name}: {exc}") from None
    diag = np.diag(a)
    bad = np.flatnonzero(diag <= 0)
    if bad.size:
        i = bad[0]
        raise ValidationError(f"{name}[{i}][{i}] = {float(diag[i])!r} is not a positive variance")
    # judge definiteness on the correlation scale so widely varying units do not matter
    sigma = np.sqrt(diag)
    values = linalg.eigh_symmetric(a / np.outer(sigma, sigma)).values
    if values[-1] < -psd_tol * values[0]:
        k = int(np.flatnonzero(values < -psd_tol * values[0])[0])
        raise ValidationError(
            f"{name} is not positive semi-definite: correlation eigenvalue {k} "
            f"is {values[k]:.6g}"
        )
    return a
