"""Screen builders shared by the test modules."""
import random
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.model import (
    RGB,
    BoundingBox,
    ComponentType,
    GuiComponent,
    Origin,
    ScreenHierarchy,
    ScreenImage,
    ScreenPair,
    dump_screen_meta,
    validate_pair,
)
from app.utils.render import render_text_block

WORDS = ["Login", "Sign up", "Cancel", "Profile", "Settings", "OK", "Next", "Search", "Home", "Email address"]

RANDOM_TYPES = [
    ComponentType.TEXT,
    ComponentType.BUTTON,
    ComponentType.INPUT,
    ComponentType.IMAGE,
    ComponentType.OTHER,
]


def leaf(cid: str, ctype: ComponentType, x: int, y: int, w: int, h: int, text: Optional[str] = None):
    return GuiComponent(id=cid, ctype=ctype, bounds=BoundingBox.of(x, y, w, h), text=text)


def container(cid: str, x: int, y: int, w: int, h: int, children: Sequence[GuiComponent]):
    return GuiComponent(
        id=cid, ctype=ComponentType.CONTAINER, bounds=BoundingBox.of(x, y, w, h), children=tuple(children)
    )


def screen(
    width: int,
    height: int,
    children: Sequence[GuiComponent],
    image: Optional[ScreenImage] = None,
    origin: Origin = Origin.MOCKUP,
) -> ScreenPair:
    root = container("root", 0, 0, width, height, children)
    hierarchy = ScreenHierarchy(screen_w=width, screen_h=height, root=root)
    return validate_pair(hierarchy, image or ScreenImage.blank(width, height), origin)


def solid(width: int, height: int, color: RGB) -> ScreenImage:
    return ScreenImage.blank(width, height, color)


def _color(rng: random.Random) -> RGB:
    return (rng.randrange(256), rng.randrange(256), rng.randrange(256))


def random_screen(
    rng: random.Random, width: int = 240, height: int = 320, cols: int = 3, rows: int = 4
) -> ScreenPair:
    """A screen of non-overlapping random leaves on a cols x rows grid, sometimes grouped in a container."""
    cell_w, cell_h = width // cols, height // rows
    pixels = np.full((height, width, 3), 255, dtype=np.uint8)
    leaves: List[GuiComponent] = []
    for r in range(rows):
        for c in range(cols):
            if rng.random() < 0.25:
                continue
            w, h = rng.randint(8, cell_w - 4), rng.randint(8, cell_h - 4)
            x = c * cell_w + rng.randint(0, cell_w - w - 1)
            y = r * cell_h + rng.randint(0, cell_h - h - 1)
            ctype = rng.choice(RANDOM_TYPES)
            bounds = BoundingBox.of(x, y, w, h)
            fg, bg = _color(rng), _color(rng)
            text = rng.choice(WORDS) if ctype.carries_text else None
            if text is not None:
                render_text_block(pixels, bounds, text, fg, bg)
            else:
                pixels[y : y + h, x : x + w] = bg
                pixels[y + h // 4 : y + h // 2, x + w // 4 : x + w // 2] = fg
            leaves.append(GuiComponent(id=f"n{r}{c}", ctype=ctype, bounds=bounds, text=text))

    children: List[GuiComponent] = list(leaves)
    if len(leaves) >= 2 and rng.random() < 0.5:
        first, second = leaves[0], leaves[1]
        box = first.bounds.union(second.bounds)
        group = container("group", box.x, box.y, box.w, box.h, [first, second])
        children = [group] + leaves[2:]
    return screen(width, height, children, ScreenImage.from_array(pixels))


def write_pair(directory: Path, pair: ScreenPair, stem: str) -> Tuple[Path, Path]:
    """Write ``<stem>.png`` and ``<stem>.json``; returns (image path, metadata path)."""
    directory.mkdir(parents=True, exist_ok=True)
    image_path = directory / f"{stem}.png"
    meta_path = directory / f"{stem}.json"
    pair.image.save_png(image_path)
    meta_path.write_bytes(dump_screen_meta(pair.hierarchy))
    return image_path, meta_path
