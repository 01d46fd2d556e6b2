"""Low-level SVG building blocks: document, number formatting, axes, ticks."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

SVG_NS = "http://www.w3.org/2000/svg"


def fmt_num(v: float) -> str:
    """Deterministic compact number formatting (12 significant digits)."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot write non-finite coordinate {v}")
    if v == 0:
        return "0"
    return format(v, ".12g")


def fmt_sig(v: float, digits: int = 3) -> str:
    """``v`` rounded to ``digits`` significant figures, without exponent notation."""
    v = float(v)
    if v == 0 or not math.isfinite(v):
        return "0" if v == 0 else str(v)
    mag = math.floor(math.log10(abs(v)))
    decimals = digits - 1 - mag
    rounded = round(v, decimals)
    # rounding can carry into the next decade (9.996 -> 10.0)
    if rounded != 0 and math.floor(math.log10(abs(rounded))) > mag:
        decimals -= 1
    return f"{rounded:.{max(decimals, 0)}f}"


def fmt_p(p: float) -> str:
    return format(p, ".3g")


class Document:
    """An SVG document tree with attribute order preserved as inserted."""

    def __init__(self, width: float, height: float):
        self.root = ET.Element(
            "svg",
            {
                "xmlns": SVG_NS,
                "version": "1.1",
                "width": fmt_num(width),
                "height": fmt_num(height),
                "viewBox": f"0 0 {fmt_num(width)} {fmt_num(height)}",
            },
        )
        self._defs = None

    @property
    def defs(self) -> ET.Element:
        if self._defs is None:
            self._defs = ET.Element("defs")
            self.root.insert(0, self._defs)
        return self._defs

    def to_string(self) -> str:
        ET.indent(self.root, space="  ")
        body = ET.tostring(self.root, encoding="unicode")
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def sub(parent: ET.Element, tag: str, text: str | None = None, **attrs) -> ET.Element:
    """Append a child element; ``class_`` and ``_`` in names map to ``class`` and ``-``."""
    clean = {}
    for key, value in attrs.items():
        if value is None:
            continue
        key = "class" if key == "class_" else key.replace("_", "-")
        clean[key] = fmt_num(value) if isinstance(value, (int, float)) else str(value)
    el = ET.SubElement(parent, tag, clean)
    if text is not None:
        el.text = text
    return el


def nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Tick positions on a 1-2-5 ladder covering ``[lo, hi]``."""
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target, 1)
    base = 10.0 ** math.floor(math.log10(raw))
    step = min(
        (f * base for f in (0.5, 1.0, 2.0, 5.0, 10.0)),
        key=lambda s: abs((hi - lo) / s - target),
    )
    first = math.ceil(lo / step - 1e-9)
    last = math.floor(hi / step + 1e-9)
    return [round(k * step, 12) for k in range(first, last + 1)]


def tick_label(v: float, ticks: list[float]) -> str:
    if len(ticks) > 1:
        step = abs(ticks[1] - ticks[0])
        decimals = max(0, -math.floor(math.log10(step) + 1e-9))
    else:
        decimals = 2
    text = f"{v:.{decimals}f}"
    return "0" if float(text) == 0 else text


class Frame:
    """Linear map from a data box to a pixel box (y axis pointing up)."""

    def __init__(self, x_range, y_range, left, top, width, height):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left, self.top, self.width, self.height = left, top, width, height

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * self.width

    def py(self, y: float) -> float:
        return self.top + (self.y1 - y) / (self.y1 - self.y0) * self.height


def lightness_to_gray(lstar: float) -> str:
    """sRGB hex gray with CIE lightness ``lstar`` in [0, 100]."""
    lstar = min(max(lstar, 0.0), 100.0)
    fy = (lstar + 16.0) / 116.0
    y = fy**3 if lstar > 8.0 else lstar / 903.3
    if y <= 0.0031308:
        srgb = 12.92 * y
    else:
        srgb = 1.055 * y ** (1 / 2.4) - 0.055
    level = int(round(min(max(srgb, 0.0), 1.0) * 255))
    return f"#{level:02x}{level:02x}{level:02x}"
