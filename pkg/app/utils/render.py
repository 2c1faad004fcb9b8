"""Placeholder glyph rendering for synthetic screens.

Text is drawn as one solid block per non-space character instead of rasterized
font glyphs, so generated screens are identical on every platform. Glyph blocks
cover at most 60% of a character cell's width and half of the box height, which
keeps the background the dominant color of every text box.
"""
from typing import Optional

import numpy as np

from app.model import RGB, BoundingBox

MARGIN = 2


def glyph_cell(bounds: BoundingBox, length: int):
    """(cell width, glyph width, glyph height, glyph top) for ``length`` characters."""
    glyph_h = max(1, bounds.h // 2)
    cell_w = min(max(1, (bounds.w - 2 * MARGIN) // max(1, length)), max(2, glyph_h))
    glyph_w = max(1, cell_w * 6 // 10)
    top = bounds.y + (bounds.h - glyph_h) // 2
    return cell_w, glyph_w, glyph_h, top


def render_text_block(
    pixels: np.ndarray, bounds: BoundingBox, text: Optional[str], fg: RGB, bg: RGB
) -> None:
    """Paint ``bounds`` with ``bg`` and draw placeholder glyphs for ``text`` in ``fg``, in place."""
    pixels[bounds.y : bounds.bottom, bounds.x : bounds.right] = bg
    if not text:
        return
    cell_w, glyph_w, glyph_h, top = glyph_cell(bounds, len(text))
    for k, char in enumerate(text):
        if char.isspace():
            continue
        left = bounds.x + MARGIN + k * cell_w
        right = min(left + glyph_w, bounds.right)
        if left >= right:
            break
        pixels[top : top + glyph_h, left:right] = fg
