"""Plot glyphs in data coordinates.

Nothing in here draws; every function turns statistics into plain geometric
records that the SVG renderer (or any other backend) can consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from corrviz import linalg, stats
from corrviz.errors import ZeroModelValue
from corrviz.stats import CorrelationDecomposition, DataSet, ReducedCovariance

#: Bands narrower than this fraction of sigma_i are flagged degenerate.
DEGENERATE_BAND_RTOL = 1e-12
HINTON_ZERO = 1e-15

ABOVE, BELOW = "above", "below"
COMPONENT_POSITIVE, COMPONENT_NEGATIVE = "component_positive", "component_negative"
FULL_MARGINAL, REMAINING, CONDITIONAL_SLICE = "full_marginal", "remaining", "conditional_slice"


@dataclass(frozen=True)
class CorrelationLinePair:
    i: int
    j: int
    segment_a: tuple
    segment_b: tuple
    rho: float


@dataclass(frozen=True)
class HatchBand:
    index: int
    side: str
    inner: float
    outer: float
    hatch_class: str
    component: int
    degenerate: bool


@dataclass(frozen=True)
class TriangleMarker:
    index: int
    upper: float
    lower: float


@dataclass(frozen=True)
class HintonCell:
    i: int
    j: int
    center: tuple
    radius: float
    sign: str


@dataclass(frozen=True)
class EllipseSpec:
    """Locus ``p^T cov^-1 p = 1`` of a 2x2 covariance, centered at the origin."""

    pair: tuple
    semi_axes: tuple
    angle: float
    style_class: str
    cov: np.ndarray
    degenerate: bool = False
    center: tuple = (0.0, 0.0)

    def points(self, n: int = 360) -> np.ndarray:
        """``n`` boundary points as an ``(n, 2)`` array."""
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        a, b = self.semi_axes
        c, s = math.cos(self.angle), math.sin(self.angle)
        px = a * np.cos(t)
        py = b * np.sin(t)
        return np.column_stack(
            [self.center[0] + c * px - s * py, self.center[1] + s * px + c * py]
        )


@dataclass(frozen=True)
class PairEllipses:
    i: int
    j: int
    full_marginal: EllipseSpec
    remaining: EllipseSpec
    conditional_slice: EllipseSpec


def correlation_line_endpoints(xi, yi, sigma_i, xj, yj, sigma_j, rho, i=0, j=1):
    """Two segments attaching at relative height ``|rho|`` of each error bar.

    Positive correlation joins same sides, negative correlation joins
    opposite sides so the segments cross, zero correlation collapses both
    onto the direct connector.
    """
    hi = abs(rho) * sigma_i
    hj = math.copysign(abs(rho), rho) * sigma_j
    a = ((xi, yi + hi), (xj, yj + hj))
    b = ((xi, yi - hi), (xj, yj - hj))
    return CorrelationLinePair(i, j, a, b, float(rho))


def correlation_lines(x, y, sigma, corr, all_pairs: bool = False) -> list[CorrelationLinePair]:
    """Correlation lines between neighbours, or between every pair."""
    n = len(x)
    if all_pairs:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        pairs = [(i, i + 1) for i in range(n - 1)]
    return [
        correlation_line_endpoints(
            x[i], y[i], sigma[i], x[j], y[j], sigma[j], corr[i][j], i, j
        )
        for i, j in pairs
    ]


def hatch_bands(
    y, sigma, decomp: CorrelationDecomposition, reduced: ReducedCovariance
) -> list[HatchBand]:
    """Bands between the remaining and full error bars, one per kept component.

    Components are added back to ``K`` from the smallest kept eigenvalue to
    the largest; each step widens the error bar and the added annulus is
    hatched by the sign of the component's element at that point.
    """
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    vectors = decomp.eigenvectors
    bands = []
    for i in range(len(y)):
        var = reduced.remaining[i, i]
        edge = sigma[i] * math.sqrt(max(var, 0.0))
        for k in reversed(range(reduced.n_components)):
            var += reduced.contributions[k][i, i]
            new_edge = sigma[i] * math.sqrt(max(var, 0.0))
            degenerate = abs(new_edge - edge) < DEGENERATE_BAND_RTOL * sigma[i]
            positive = vectors[i, k] > 0
            up = COMPONENT_POSITIVE if positive else COMPONENT_NEGATIVE
            down = COMPONENT_NEGATIVE if positive else COMPONENT_POSITIVE
            bands.append(HatchBand(i, ABOVE, y[i] + edge, y[i] + new_edge, up, k, degenerate))
            bands.append(HatchBand(i, BELOW, y[i] - edge, y[i] - new_edge, down, k, degenerate))
            edge = new_edge
    return bands


def conditional_markers(y, sigma_cond) -> list[TriangleMarker]:
    return [
        TriangleMarker(i, float(yi + s), float(yi - s))
        for i, (yi, s) in enumerate(zip(y, sigma_cond))
    ]


def hinton_cells(corr, max_radius: float = 1.0) -> list[HintonCell]:
    """One circle per matrix element with area proportional to ``|c_ij|``.

    Centers are in cell units (column ``j + 0.5``, row ``i + 0.5``) and the
    radius is a fraction of half the cell width.
    """
    corr = np.asarray(corr, dtype=float)
    cells = []
    for i in range(corr.shape[0]):
        for j in range(corr.shape[1]):
            c = corr[i, j]
            if abs(c) <= HINTON_ZERO:
                sign = "zero"
            else:
                sign = "positive" if c > 0 else "negative"
            radius = math.sqrt(min(abs(c), 1.0)) * max_radius
            cells.append(HintonCell(i, j, (j + 0.5, i + 0.5), radius, sign))
    return cells


def ellipse_from_cov2(cov2, style_class: str, pair=(0, 1)) -> EllipseSpec:
    cov2 = linalg.as_symmetric(cov2)
    if cov2.shape != (2, 2):
        raise ValueError(f"expected a 2x2 covariance, got shape {cov2.shape}")
    eigen = linalg.eigh_symmetric(cov2)
    l1, l2 = eigen.values
    lead = stats.normalize_signs(eigen.vectors)[:, 0]
    angle = math.atan2(lead[1], lead[0])
    if angle >= math.pi / 2:
        angle -= math.pi
    elif angle < -math.pi / 2:
        angle += math.pi
    degenerate = l2 <= 1e-12 * l1
    semi = (math.sqrt(max(l1, 0.0)), math.sqrt(max(l2, 0.0)))
    return EllipseSpec(tuple(pair), semi, angle, style_class, cov2, degenerate)


def pairwise_ellipse_grid(
    dataset: DataSet, decomp: CorrelationDecomposition, reduced: ReducedCovariance | None
) -> list[PairEllipses]:
    """Full, remaining and conditional ellipses for every pair ``i < j``."""
    n = dataset.n
    if n < 2:
        raise ValueError("pairwise ellipses need at least two points")
    cov = dataset.cov
    if reduced is None:
        remaining_cov = cov
    else:
        remaining_cov = stats.remaining_covariance(decomp.sigma, reduced.remaining)
    precision = linalg.inverse_spd(cov)
    grid = []
    for i in range(n):
        for j in range(i + 1, n):
            idx = np.ix_([i, j], [i, j])
            cond = linalg.inverse_spd(precision[idx])
            grid.append(
                PairEllipses(
                    i,
                    j,
                    ellipse_from_cov2(cov[idx], FULL_MARGINAL, (i, j)),
                    ellipse_from_cov2(remaining_cov[idx], REMAINING, (i, j)),
                    ellipse_from_cov2(cond, CONDITIONAL_SLICE, (i, j)),
                )
            )
    return grid


def ratio_view(dataset: DataSet, model_index=0) -> DataSet:
    """Divide data, covariance and all models by one reference model.

    The reference model becomes the constant line 1 and the squared
    M-distance of every model is unchanged.
    """
    m = np.asarray(dataset.model(model_index), dtype=float)
    zero = np.flatnonzero(m == 0)
    if zero.size:
        raise ZeroModelValue(f"reference model value [{zero[0]}] is zero")
    models = tuple((name, values / m) for name, values in dataset.models)
    return DataSet(
        dataset.x,
        dataset.y / m,
        dataset.cov / np.outer(m, m),
        models,
        dataset.labels,
        dataset.x_label,
        None if dataset.y_label is None else f"{dataset.y_label} / model",
    )
