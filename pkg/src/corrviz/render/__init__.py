"""Deterministic SVG output for corrviz scenes and matrices."""

from corrviz.render.plots import (
    render_matrix,
    render_pairwise_grid,
    render_pc_plot,
    render_ratio_plot,
)
from corrviz.render.scene import (
    PlotScene,
    classic_scene,
    corrlines_scene,
    pc_scene,
    ratio_scene,
)
from corrviz.render.style import StyleConfig, load_style

__all__ = [
    "PlotScene",
    "StyleConfig",
    "classic_scene",
    "corrlines_scene",
    "load_style",
    "pc_scene",
    "ratio_scene",
    "render_matrix",
    "render_pairwise_grid",
    "render_pc_plot",
    "render_ratio_plot",
]
