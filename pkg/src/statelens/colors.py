"""sRGB colors as 8-bit triples with #RRGGBB parsing/formatting."""

from __future__ import annotations

import re
from dataclasses import dataclass

_HEX_RE = re.compile(r"^#([0-9a-fA-F]{6})$")

WHITE_COMPONENT = 255


@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not (0 <= v <= 255):
                raise ValueError(f"color component {name}={v} outside [0, 255]")

    @classmethod
    def parse(cls, text: str) -> "Color":
        m = _HEX_RE.match(text.strip())
        if m is None:
            raise ValueError(f"expected a #RRGGBB color, got {text!r}")
        raw = m.group(1)
        return cls(int(raw[0:2], 16), int(raw[2:4], 16), int(raw[4:6], 16))

    def hex(self) -> str:
        return f"#{self.r:02x}{self.g:02x}{self.b:02x}"


WHITE = Color(255, 255, 255)


def toward_white(color: Color, t: float) -> Color:
    """Point on the white->color segment: white + t*(color - white), t in [0, 1]."""
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"interpolation parameter t={t} outside [0, 1]")
    mix = lambda c: int(round(WHITE_COMPONENT + t * (c - WHITE_COMPONENT)))
    return Color(mix(color.r), mix(color.g), mix(color.b))
