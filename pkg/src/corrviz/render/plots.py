"""SVG renderers for plot scenes, correlation matrices and ellipse grids.

Element ids are stable and part of the public contract:
``point-<i>``, ``band-<i>-<side>-<k>``, ``corrline-<i>-<j>-<a|b>``,
``hinton-<i>-<j>`` and ``panel-<i>-<j>``.
"""

from __future__ import annotations

import math

import numpy as np

from corrviz import geometry
from corrviz.errors import EmptyScene
from corrviz.render.scene import PlotScene
from corrviz.render.style import StyleConfig
from corrviz.render.svg import (
    Document,
    Frame,
    fmt_num,
    fmt_p,
    fmt_sig,
    lightness_to_gray,
    nice_ticks,
    sub,
    tick_label,
)

HATCH_IDS = {
    geometry.COMPONENT_POSITIVE: "hatch-positive",
    geometry.COMPONENT_NEGATIVE: "hatch-negative",
}


def legend_text(entry) -> str:
    return f"{entry.name}: d² = {fmt_sig(entry.d2)}, dof = {entry.dof}, p = {fmt_p(entry.p_value)}"


def render_pc_plot(scene: PlotScene, style: StyleConfig | None = None) -> str:
    """Render any data-plot scene (classic, correlation lines, principal component)."""
    return _render_plot(scene, style or StyleConfig())


def render_ratio_plot(scene: PlotScene, style: StyleConfig | None = None) -> str:
    if scene.gradient_endpoint_d2 is None:
        raise ValueError("ratio plot needs the gradient endpoint d2 (build it with ratio_scene)")
    return _render_plot(scene, style or StyleConfig())


def _render_plot(scene: PlotScene, style: StyleConfig) -> str:
    if not scene.errorbars:
        raise EmptyScene("scene has no data points")
    scene.validate()
    line_height = style.font_size * 1.4
    top = style.margin_top + line_height * (len(scene.legend) + (1 if scene.title else 0))
    frame = Frame(
        scene.x_range,
        scene.y_range,
        style.margin_left,
        top,
        style.width - style.margin_left - style.margin_right,
        style.height - top - style.margin_bottom,
    )
    doc = Document(style.width, style.height)
    doc.root.set("font-family", style.font_family)
    doc.root.set("font-size", fmt_num(style.font_size))
    sub(doc.root, "rect", id="background", x=0, y=0, width=style.width, height=style.height, fill="white")

    _draw_axes(doc, frame, scene, style)

    if scene.reference_line is not None:
        g = sub(doc.root, "g", id="reference")
        y = frame.py(scene.reference_line)
        sub(g, "line", id="reference-line", x1=frame.left, y1=y, x2=frame.left + frame.width, y2=y,
            stroke="#555555", stroke_width=style.thin_stroke)

    g = sub(doc.root, "g", id="bands")
    used = []
    for band in scene.bands:
        if band.degenerate:
            continue
        hatch = HATCH_IDS[band.hatch_class]
        if hatch not in used:
            used.append(hatch)
        x = frame.px(scene.errorbars[band.index].x)
        y_lo, y_hi = sorted((frame.py(band.inner), frame.py(band.outer)))
        sub(g, "rect", id=f"band-{band.index}-{band.side}-{band.component}",
            class_=band.hatch_class, x=x - style.band_width / 2, y=y_lo,
            width=style.band_width, height=y_hi - y_lo, fill=f"url(#{hatch})",
            stroke="black", stroke_width=style.thin_stroke)
    for hatch in sorted(used):
        _hatch_pattern(doc, hatch, style)

    g = sub(doc.root, "g", id="errorbars")
    for bar in scene.errorbars:
        x = frame.px(bar.x)
        sub(g, "line", id=f"errorbar-{bar.index}", x1=x, y1=frame.py(bar.y - bar.sigma),
            x2=x, y2=frame.py(bar.y + bar.sigma), stroke="black", stroke_width=style.stroke_width)

    g = sub(doc.root, "g", id="corrlines")
    for pair in scene.line_pairs:
        for tag, seg in (("a", pair.segment_a), ("b", pair.segment_b)):
            (x1, y1), (x2, y2) = seg
            sub(g, "line", id=f"corrline-{pair.i}-{pair.j}-{tag}", x1=frame.px(x1), y1=frame.py(y1),
                x2=frame.px(x2), y2=frame.py(y2), stroke="black", stroke_width=style.thin_stroke)

    g = sub(doc.root, "g", id="conditional")
    for tri in scene.triangles:
        x = frame.px(scene.errorbars[tri.index].x)
        for name, y, direction in (("upper", tri.upper, -1), ("lower", tri.lower, 1)):
            apex = frame.py(y)
            base = apex + direction * style.triangle_height
            w = style.triangle_half_width
            pts = f"{fmt_num(x)},{fmt_num(apex)} {fmt_num(x - w)},{fmt_num(base)} {fmt_num(x + w)},{fmt_num(base)}"
            sub(g, "polygon", id=f"cond-{tri.index}-{name}", points=pts, fill="black")

    g = sub(doc.root, "g", id="models")
    for k, model in enumerate(scene.models):
        pts = " ".join(f"{fmt_num(frame.px(x))},{fmt_num(frame.py(y))}" for x, y in zip(model.x, model.y))
        dash = style.model_dashes[k % len(style.model_dashes)]
        sub(g, "polyline", id=f"model-{k}", points=pts, fill="none", stroke="black",
            stroke_width=style.stroke_width, stroke_dasharray=None if dash == "none" else dash)

    g = sub(doc.root, "g", id="arrows")
    tol = 1e-12 * (scene.y_range[1] - scene.y_range[0])
    drawn = [a for a in scene.arrows if abs(a.y_to - a.y_from) > tol]
    if drawn:
        marker = sub(doc.defs, "marker", id="arrowhead", markerWidth=style.arrow_head,
                     markerHeight=style.arrow_head, refX=style.arrow_head, refY=style.arrow_head / 2,
                     orient="auto", markerUnits="userSpaceOnUse")
        h = style.arrow_head
        sub(marker, "path", d=f"M0,0 L{fmt_num(h)},{fmt_num(h / 2)} L0,{fmt_num(h)} Z", fill="black")
    for arrow in drawn:
        x = frame.px(arrow.x)
        sub(g, "line", id=f"arrow-{arrow.index}", x1=x, y1=frame.py(arrow.y_from), x2=x,
            y2=frame.py(arrow.y_to), stroke="black", stroke_width=style.stroke_width,
            marker_end="url(#arrowhead)")

    g = sub(doc.root, "g", id="points")
    for bar in scene.errorbars:
        sub(g, "circle", id=f"point-{bar.index}", cx=frame.px(bar.x), cy=frame.py(bar.y),
            r=style.point_radius, fill="black")

    _draw_legend(doc, scene, style, line_height)
    return doc.to_string()


def _hatch_pattern(doc: Document, hatch: str, style: StyleConfig):
    angle = style.hatch_positive_angle if hatch == "hatch-positive" else style.hatch_negative_angle
    s = style.hatch_spacing
    pattern = sub(doc.defs, "pattern", id=hatch, patternUnits="userSpaceOnUse", width=s, height=s,
                  patternTransform=f"rotate({fmt_num(angle)})")
    sub(pattern, "line", x1=0, y1=0, x2=0, y2=s, stroke="black", stroke_width=style.thin_stroke)


def _draw_axes(doc: Document, frame: Frame, scene: PlotScene, style: StyleConfig):
    g = sub(doc.root, "g", id="axes", stroke="black", stroke_width=style.thin_stroke)
    sub(g, "rect", id="frame", x=frame.left, y=frame.top, width=frame.width, height=frame.height, fill="none")
    bottom = frame.top + frame.height
    xticks = nice_ticks(*scene.x_range)
    for t in xticks:
        x = frame.px(t)
        sub(g, "line", x1=x, y1=bottom, x2=x, y2=bottom + 5)
        sub(g, "text", tick_label(t, xticks), x=x, y=bottom + 5 + style.font_size,
            text_anchor="middle", stroke="none")
    yticks = nice_ticks(*scene.y_range)
    for t in yticks:
        y = frame.py(t)
        sub(g, "line", x1=frame.left - 5, y1=y, x2=frame.left, y2=y)
        sub(g, "text", tick_label(t, yticks), x=frame.left - 8, y=y + style.font_size / 3,
            text_anchor="end", stroke="none")
    if scene.x_label:
        sub(g, "text", scene.x_label, id="x-label", x=frame.left + frame.width / 2,
            y=style.height - style.font_size / 2, text_anchor="middle", stroke="none")
    if scene.y_label:
        cx, cy = style.font_size, frame.top + frame.height / 2
        sub(g, "text", scene.y_label, id="y-label", x=cx, y=cy, text_anchor="middle", stroke="none",
            transform=f"rotate(-90 {fmt_num(cx)} {fmt_num(cy)})")


def _draw_legend(doc: Document, scene: PlotScene, style: StyleConfig, line_height: float):
    g = sub(doc.root, "g", id="legend")
    y = style.margin_top
    if scene.title:
        sub(g, "text", scene.title, id="title", x=style.margin_left, y=y + style.font_size,
            font_weight="bold")
        y += line_height
    dashes = {m.name: style.model_dashes[k % len(style.model_dashes)] for k, m in enumerate(scene.models)}
    for k, entry in enumerate(scene.legend):
        base = y + style.font_size * 0.65
        x0 = style.margin_left
        dash = dashes.get(entry.name)
        if dash is not None:
            sub(g, "line", x1=x0, y1=base - style.font_size / 3, x2=x0 + 24, y2=base - style.font_size / 3,
                stroke="black", stroke_width=style.stroke_width,
                stroke_dasharray=None if dash == "none" else dash)
        sub(g, "text", legend_text(entry), id=f"legend-{k}", x=x0 + 30, y=base + style.font_size / 3)
        y += line_height


def render_matrix(corr, mode: str = "hinton", style: StyleConfig | None = None, labels=None) -> str:
    """Correlation matrix as a grayscale heatmap or a Hinton diagram."""
    style = style or StyleConfig()
    corr = np.asarray(corr, dtype=float)
    n = corr.shape[0]
    if corr.ndim != 2 or corr.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {corr.shape}")
    if np.any(np.abs(corr) > 1 + 1e-12):
        raise ValueError("correlation entries must lie in [-1, 1]")
    if mode not in ("hinton", "heatmap_gray"):
        raise ValueError(f"unknown matrix mode {mode!r}")
    labels = list(labels) if labels is not None else [str(i + 1) for i in range(n)]
    cell = style.cell_size
    left = top = style.font_size * 3
    ramp_w = 0 if mode == "hinton" else 3 * cell
    width = left + n * cell + style.margin_right + ramp_w
    height = top + n * cell + style.margin_right
    doc = Document(width, height)
    doc.root.set("font-family", style.font_family)
    doc.root.set("font-size", fmt_num(style.font_size))
    sub(doc.root, "rect", id="background", x=0, y=0, width=width, height=height, fill="white")

    g = sub(doc.root, "g", id="labels")
    for k, label in enumerate(labels):
        sub(g, "text", label, x=left + (k + 0.5) * cell, y=top - style.font_size / 2, text_anchor="middle")
        sub(g, "text", label, x=left - style.font_size / 2, y=top + (k + 0.5) * cell + style.font_size / 3,
            text_anchor="end")

    if mode == "heatmap_gray":
        g = sub(doc.root, "g", id="cells")
        for i in range(n):
            for j in range(n):
                sub(g, "rect", id=f"cell-{i}-{j}", x=left + j * cell, y=top + i * cell,
                    width=cell, height=cell, fill=heatmap_fill(corr[i, j]))
        g = sub(doc.root, "g", id="ramp")
        steps = 10
        for k in range(steps + 1):
            value = 1.0 - 2.0 * k / steps
            y = top + k * (n * cell) / (steps + 1)
            sub(g, "rect", id=f"ramp-{k}", x=left + n * cell + cell / 2, y=y, width=cell / 2,
                height=n * cell / (steps + 1), fill=heatmap_fill(value))
            if k in (0, steps // 2, steps):
                sub(g, "text", fmt_sig(value, 1) if value else "0", x=left + n * cell + 1.2 * cell,
                    y=y + n * cell / (steps + 1) / 2 + style.font_size / 3)
        return doc.to_string()

    max_r = style.hinton_fill * cell / 2
    sub(doc.root, "rect", id="hinton-background", x=left, y=top, width=n * cell, height=n * cell,
        fill=lightness_to_gray(style.hinton_background_lightness))
    g = sub(doc.root, "g", id="hinton", data_max_radius=max_r)
    fills = {"positive": "white", "negative": "black", "zero": "none"}
    for c in geometry.hinton_cells(corr):
        sub(g, "circle", id=f"hinton-{c.i}-{c.j}", class_=c.sign, cx=left + c.center[0] * cell,
            cy=top + c.center[1] * cell, r=c.radius * max_r, fill=fills[c.sign])
    return doc.to_string()


def heatmap_fill(value: float) -> str:
    """Gray for a correlation value: -1 black, 0 mid lightness, +1 white."""
    return lightness_to_gray(50.0 * (1.0 + max(-1.0, min(1.0, value))))


def render_pairwise_grid(grid, style: StyleConfig | None = None) -> str:
    """Lower-triangle grid of 2D projections, one panel per pair ``i < j``.

    Solid: full marginal covariance. Dotted: remaining covariance after the
    principal-component reduction. Dashed: conditional slice with every
    other point held fixed.
    """
    style = style or StyleConfig()
    if not grid:
        raise ValueError("pairwise grid is empty")
    n = max(p.j for p in grid) + 1
    extent = np.zeros(n)
    for p in grid:
        extent[p.i] = max(extent[p.i], math.sqrt(p.full_marginal.cov[0, 0]))
        extent[p.j] = max(extent[p.j], math.sqrt(p.full_marginal.cov[1, 1]))
    extent *= 1.2
    size, gap = style.panel_size, style.panel_gap
    margin = style.margin_left
    width = margin + (n - 1) * (size + gap) + style.margin_right
    height = style.margin_top + (n - 1) * (size + gap) + style.margin_bottom
    doc = Document(width, height)
    doc.root.set("font-family", style.font_family)
    doc.root.set("font-size", fmt_num(style.font_size))
    sub(doc.root, "rect", id="background", x=0, y=0, width=width, height=height, fill="white")
    strokes = {
        geometry.FULL_MARGINAL: None,
        geometry.REMAINING: style.remaining_dash,
        geometry.CONDITIONAL_SLICE: style.conditional_dash,
    }
    for p in grid:
        left = margin + p.i * (size + gap)
        top = style.margin_top + (p.j - 1) * (size + gap)
        frame = Frame((-extent[p.i], extent[p.i]), (-extent[p.j], extent[p.j]), left, top, size, size)
        g = sub(doc.root, "g", id=f"panel-{p.i}-{p.j}", class_="panel")
        sub(g, "rect", x=left, y=top, width=size, height=size, fill="none", stroke="black",
            stroke_width=style.thin_stroke)
        cx, cy = frame.px(0.0), frame.py(0.0)
        sub(g, "line", x1=left, y1=cy, x2=left + size, y2=cy, stroke="#999999", stroke_width=style.thin_stroke)
        sub(g, "line", x1=cx, y1=top, x2=cx, y2=top + size, stroke="#999999", stroke_width=style.thin_stroke)
        for spec in (p.full_marginal, p.remaining, p.conditional_slice):
            pts = spec.points(style.ellipse_points)
            d = "M" + " L".join(f"{fmt_num(frame.px(a))},{fmt_num(frame.py(b))}" for a, b in pts) + " Z"
            sub(g, "path", id=f"ellipse-{p.i}-{p.j}-{spec.style_class}", class_=spec.style_class, d=d,
                fill="none", stroke="black", stroke_width=style.stroke_width,
                stroke_dasharray=strokes[spec.style_class])
        sub(g, "text", f"Δy{p.i + 1}", x=left + size / 2, y=top + size + style.font_size * 1.2,
            text_anchor="middle")
        sub(g, "text", f"Δy{p.j + 1}", x=left - style.font_size * 0.4, y=top + size / 2, text_anchor="end")
    return doc.to_string()
