from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class StyleConfig:
    """Visual constants for every renderer. All lengths are in pixels.

    The two hatch classes differ by stroke orientation only, so they stay
    distinguishable in grayscale.
    """

    width: float = 640.0
    height: float = 420.0
    margin_left: float = 70.0
    margin_right: float = 20.0
    margin_top: float = 20.0
    margin_bottom: float = 50.0
    font_size: float = 12.0
    font_family: str = "sans-serif"
    stroke_width: float = 1.2
    thin_stroke: float = 0.8
    point_radius: float = 3.0
    band_width: float = 12.0
    hatch_spacing: float = 5.0
    hatch_positive_angle: float = 45.0
    hatch_negative_angle: float = 135.0
    triangle_half_width: float = 5.0
    triangle_height: float = 6.0
    arrow_head: float = 6.0
    # matrix plots
    cell_size: float = 28.0
    hinton_fill: float = 0.95
    hinton_background_lightness: float = 50.0
    # pairwise grid
    panel_size: float = 160.0
    panel_gap: float = 24.0
    ellipse_points: int = 180
    remaining_dash: str = "1.5,2.5"
    conditional_dash: str = "6,4"
    model_dashes: tuple = ("none", "7,3", "2,2", "9,3,2,3")

    def __post_init__(self):
        if self.hatch_positive_angle % 180 == self.hatch_negative_angle % 180:
            raise ValueError("the two hatch orientations must differ")

    def updated(self, **changes) -> "StyleConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["model_dashes"] = list(self.model_dashes)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StyleConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown style keys: {', '.join(unknown)}")
        data = dict(data)
        if "model_dashes" in data:
            data["model_dashes"] = tuple(data["model_dashes"])
        return cls(**data)


def load_style(path) -> StyleConfig:
    return StyleConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
