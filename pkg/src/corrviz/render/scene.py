"""Plot scenes: every glyph of a data plot, resolved in data coordinates.

The builders here combine :mod:`corrviz.stats` and :mod:`corrviz.geometry`
into one :class:`PlotScene` per plot style. Reading a principal-component
scene works from the outside in:

1. The outer edges of the hatched bands are the ordinary marginal error bars.
2. If a model deviates from the data on the side with the same hatch class at
   every point where it is outside the inner edges, compare it with the outer
   edges; otherwise compare it with the inner edges (the remaining
   uncertainty). Bands too thin to tell apart do not matter.
3. The triangle tips mark the conditional uncertainty of each point, the part
   that does not depend on any other point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from corrviz import geometry, linalg, stats
from corrviz.errors import ZeroGradient
from corrviz.geometry import CorrelationLinePair, HatchBand, TriangleMarker
from corrviz.stats import DataSet

#: Correlation lines are dropped when no off-diagonal |K_ij| reaches this.
AUTO_OMIT_THRESHOLD = 0.05
LINES_ON = ("remaining", "full")


@dataclass(frozen=True)
class ErrorBar:
    index: int
    x: float
    y: float
    sigma: float


@dataclass(frozen=True)
class ModelLine:
    name: str
    x: tuple
    y: tuple


@dataclass(frozen=True)
class Arrow:
    index: int
    x: float
    y_from: float
    y_to: float


@dataclass(frozen=True)
class LegendEntry:
    name: str
    d2: float
    dof: int
    p_value: float


@dataclass
class PlotScene:
    x_range: tuple
    y_range: tuple
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    errorbars: list = field(default_factory=list)
    bands: list = field(default_factory=list)
    line_pairs: list = field(default_factory=list)
    triangles: list = field(default_factory=list)
    models: list = field(default_factory=list)
    arrows: list = field(default_factory=list)
    legend: list = field(default_factory=list)
    reference_line: float | None = None
    gradient_endpoint_d2: float | None = None

    def y_values(self):
        for bar in self.errorbars:
            yield from (bar.y - bar.sigma, bar.y + bar.sigma)
        for band in self.bands:
            yield from (band.inner, band.outer)
        for pair in self.line_pairs:
            for seg in (pair.segment_a, pair.segment_b):
                yield from (seg[0][1], seg[1][1])
        for tri in self.triangles:
            yield from (tri.upper, tri.lower)
        for model in self.models:
            yield from model.y
        for arrow in self.arrows:
            yield from (arrow.y_from, arrow.y_to)
        if self.reference_line is not None:
            yield self.reference_line

    def x_values(self):
        for bar in self.errorbars:
            yield bar.x
        for model in self.models:
            yield from model.x

    def validate(self):
        """Check every coordinate is finite and inside the declared ranges."""
        for entry in self.legend:
            if not 0.0 <= entry.p_value <= 1.0:
                raise ValueError(f"legend p-value {entry.p_value} outside [0, 1]")
        for axis, values, (lo, hi) in (
            ("x", self.x_values(), self.x_range),
            ("y", self.y_values(), self.y_range),
        ):
            for v in values:
                if not math.isfinite(v) or not lo <= v <= hi:
                    raise ValueError(f"{axis} coordinate {v} outside plot range [{lo}, {hi}]")


def _fit_ranges(scene: PlotScene, pad: float = 0.05) -> PlotScene:
    xs = sorted(set(scene.x_values()))
    if len(xs) > 1:
        xpad = 0.5 * min(b - a for a, b in zip(xs, xs[1:]))
    else:
        xpad = 0.5
    ys = list(scene.y_values())
    lo, hi = min(ys), max(ys)
    span = hi - lo
    ypad = pad * span if span > 0 else max(abs(lo), 1.0) * pad
    scene.x_range = (xs[0] - xpad, xs[-1] + xpad)
    scene.y_range = (lo - ypad, hi + ypad)
    return scene


def _selected_models(ds: DataSet, models):
    if models is None:
        return list(ds.models)
    return [(name, ds.model(name)) for name in models]


def _base_scene(ds: DataSet, models=None, title: str = "") -> PlotScene:
    scene = PlotScene((0, 1), (0, 1), ds.x_label or "", ds.y_label or "", title)
    sigma = ds.sigma
    scene.errorbars = [
        ErrorBar(i, float(ds.x[i]), float(ds.y[i]), float(sigma[i])) for i in range(ds.n)
    ]
    for name, values in _selected_models(ds, models):
        scene.models.append(ModelLine(name, tuple(ds.x.tolist()), tuple(values.tolist())))
        report = stats.gof(ds.y, values, ds.cov)
        scene.legend.append(LegendEntry(name, report.d2, report.dof, report.p_value))
    return scene


def classic_scene(ds: DataSet, models=None, title: str = "") -> PlotScene:
    """Marginal error bars only, with d2/dof/p in the legend."""
    return _fit_ranges(_base_scene(ds, models, title))


def corrlines_scene(ds: DataSet, models=None, all_pairs: bool = False, title: str = "") -> PlotScene:
    """Marginal error bars plus correlation lines of the full covariance."""
    scene = _base_scene(ds, models, title)
    corr = stats.correlation_of(ds.cov)
    scene.line_pairs = geometry.correlation_lines(ds.x, ds.y, ds.sigma, corr, all_pairs)
    return _fit_ranges(scene)


def pc_scene(
    ds: DataSet,
    n_components: int = 1,
    policy: str = "median",
    show_lines: bool = True,
    show_conditional: bool = True,
    lines_on: str = "remaining",
    models=None,
    all_pairs: bool = False,
    auto_omit: float | None = AUTO_OMIT_THRESHOLD,
    title: str = "",
) -> PlotScene:
    """Principal-component plot: hatched bands, correlation lines, triangles."""
    if lines_on not in LINES_ON:
        raise ValueError(f"lines_on must be one of {LINES_ON}, got {lines_on!r}")
    scene = _base_scene(ds, models, title)
    if ds.n >= 2:
        decomp = stats.correlation_from_covariance(ds.cov)
        reduced = stats.reduce_components(decomp, n_components, policy)
        scene.bands = geometry.hatch_bands(ds.y, decomp.sigma, decomp, reduced)
        if show_lines:
            if lines_on == "remaining":
                k = reduced.remaining
                line_sigma = decomp.sigma * np.sqrt(np.diag(k))
                norm = np.sqrt(np.outer(np.diag(k), np.diag(k)))
                corr = np.divide(k, norm, out=np.zeros_like(k), where=norm > 1e-300)
                strength = np.abs(k - np.diag(np.diag(k))).max()
            else:
                line_sigma = decomp.sigma
                corr = decomp.correlation
                strength = np.abs(corr - np.eye(ds.n)).max()
            if auto_omit is None or strength >= auto_omit:
                scene.line_pairs = geometry.correlation_lines(
                    ds.x, ds.y, line_sigma, corr, all_pairs
                )
    if show_conditional:
        scene.triangles = geometry.conditional_markers(ds.y, stats.conditional_sigmas(ds.cov))
    return _fit_ranges(scene)


def ratio_scene(
    ds: DataSet,
    reference=0,
    n_components: int = 1,
    policy: str = "median",
    show_lines: bool = True,
    show_conditional: bool = True,
    lines_on: str = "remaining",
    models=None,
    title: str = "",
) -> PlotScene:
    """Principal-component plot of data/model with the scaled M-distance gradient.

    Arrows start on the reference line at 1 and end where the line search
    along the negative gradient minimizes the squared M-distance.
    """
    ratio = geometry.ratio_view(ds, reference)
    ref_name = ds.model_names[reference] if isinstance(reference, int) else reference
    scene = pc_scene(
        ratio, n_components, policy, show_lines, show_conditional, lines_on, models, title=title
    )
    ones = ratio.model(ref_name)
    try:
        g = stats.mdistance_gradient(ratio.y, ones, ratio.cov)
        step = stats.scale_gradient(ratio.y, ones, ratio.cov, g)
        endpoint, endpoint_d2 = step.endpoint, step.endpoint_d2
    except ZeroGradient:
        endpoint, endpoint_d2 = ones, 0.0
    scene.arrows = [
        Arrow(i, float(ratio.x[i]), float(ones[i]), float(endpoint[i])) for i in range(ratio.n)
    ]
    scene.reference_line = 1.0
    scene.gradient_endpoint_d2 = float(endpoint_d2)
    scene.legend.append(
        LegendEntry("gradient endpoint", endpoint_d2, ratio.n, linalg.chi2_sf(endpoint_d2, ratio.n))
    )
    return _fit_ranges(scene)


__all__ = [
    "Arrow",
    "CorrelationLinePair",
    "ErrorBar",
    "HatchBand",
    "LegendEntry",
    "ModelLine",
    "PlotScene",
    "TriangleMarker",
    "classic_scene",
    "corrlines_scene",
    "pc_scene",
    "ratio_scene",
]
