"""Deterministic example datasets with characteristic covariance structures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corrviz import linalg
from corrviz.stats import DataSet

KINDS = (
    "three_point_demo",
    "uncorrelated",
    "sum_constrained",
    "single_component",
    "two_disjoint",
    "three_overlapping",
)
MIN_POINTS = {
    "three_point_demo": 3,
    "uncorrelated": 1,
    "sum_constrained": 2,
    "single_component": 2,
    "two_disjoint": 4,
    "three_overlapping": 6,
}
DEFAULT_POINTS = 10
#: Regularization added to the diagonal, relative to the largest variance.
EPSILON = 1e-6


@dataclass(frozen=True)
class ExampleSpec:
    kind: str
    n_points: int | None = None
    seed: int = 0


def generate(spec: ExampleSpec | str, n_points: int | None = None, seed: int = 0) -> DataSet:
    """Build the dataset for ``spec`` (or a bare kind name)."""
    if isinstance(spec, str):
        spec = ExampleSpec(spec, n_points, seed)
    if spec.kind not in KINDS:
        raise ValueError(f"unknown example kind {spec.kind!r}; expected one of {KINDS}")
    if spec.kind == "three_point_demo":
        if spec.n_points not in (None, 3):
            raise ValueError("three_point_demo always has exactly 3 points")
        return three_point_demo()
    n = DEFAULT_POINTS if spec.n_points is None else spec.n_points
    if n < MIN_POINTS[spec.kind]:
        raise ValueError(f"{spec.kind} needs at least {MIN_POINTS[spec.kind]} points, got {n}")

    t = np.linspace(0.0, 1.0, n)
    curve = 8.0 * np.exp(-2.0 * t) + 4.0 * np.exp(-(((t - 0.6) / 0.2) ** 2)) + 1.0
    profile = 0.08 * curve + 0.3
    cov = _COVARIANCES[spec.kind](t, profile)

    rng = np.random.default_rng(spec.seed)
    y = curve + linalg.cholesky(cov) @ rng.standard_normal(n)
    tilted = curve * (1.0 + 0.15 * (t - 0.5))
    return DataSet(
        x=np.arange(1.0, n + 1.0),
        y=y,
        cov=cov,
        models=(("truth", curve), ("tilted", tilted)),
        x_label="x",
        y_label="y",
    )


def three_point_demo() -> DataSet:
    """Three points where the visually closer model is the worse fit.

    Points 2 and 3 are 90% correlated and both anticorrelated with point 1.
    M2 is closer to every data point than M1 but sits on opposite sides of
    the correlated pair, so its squared M-distance is far larger.
    """
    corr = np.array([[1.0, -0.3, -0.3], [-0.3, 1.0, 0.9], [-0.3, 0.9, 1.0]])
    sigma = np.array([0.6, 0.8, 0.7])
    return DataSet(
        x=np.array([1.0, 2.0, 3.0]),
        y=np.array([2.0, 3.0, 2.6]),
        cov=corr * np.outer(sigma, sigma),
        models=(("M1", np.array([2.3, 2.44, 2.18])), ("M2", np.array([1.76, 2.6, 2.95]))),
        x_label="x",
        y_label="y",
    )


def _regularize(cov):
    return cov + EPSILON * np.max(np.diag(cov)) * np.eye(cov.shape[0])


def _uncorrelated(t, profile):
    return np.diag(profile**2)


def _sum_constrained(t, profile):
    # only shape freedom: the all-ones direction keeps variance eps * N
    n = t.shape[0]
    var = np.mean(profile) ** 2
    return var * (np.eye(n) - np.ones((n, n)) / n) + EPSILON * var * np.eye(n)


def _single_component(t, profile):
    return _regularize(np.outer(profile, profile))


def _two_disjoint(t, profile):
    half = t.shape[0] // 2
    first = np.where(np.arange(t.shape[0]) < half, profile, 0.0)
    second = profile - first
    return _regularize(np.outer(first, first) + np.outer(second, second))


def _three_overlapping(t, profile):
    cov = np.zeros((t.shape[0], t.shape[0]))
    for center, amplitude in ((1 / 6, 1.0), (0.5, 0.8), (5 / 6, 0.6)):
        v = amplitude * profile * np.exp(-(((t - center) / 0.25) ** 2))
        cov += np.outer(v, v)
    return _regularize(cov)


_COVARIANCES = {
    "uncorrelated": _uncorrelated,
    "sum_constrained": _sum_constrained,
    "single_component": _single_component,
    "two_disjoint": _two_disjoint,
    "three_overlapping": _three_overlapping,
}
