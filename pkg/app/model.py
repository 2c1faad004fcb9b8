"""Screen data model: component hierarchies, screenshots and their validated pairing.

A screen arrives as two inputs, a PNG screenshot and a JSON metadata document
describing its component tree. This module parses and validates both and links them
through pixel coordinates.
"""
import io
import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.errors import (
    DecodeError,
    DimensionMismatch,
    EmptyScreen,
    IOFailure,
    MalformedDocument,
    OutOfBounds,
    SchemaViolation,
    ZeroDimension,
)

logger = logging.getLogger(__name__)

RGB = Tuple[int, int, int]


class BoundingBox(BaseModel):
    """Axis-aligned pixel rectangle, origin at the top-left corner of the screen."""

    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)

    @classmethod
    def of(cls, x: int, y: int, w: int, h: int) -> "BoundingBox":
        return cls(x=x, y=y, w=w, h=h)

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)

    def fits(self, width: int, height: int) -> bool:
        return self.right <= width and self.bottom <= height

    def intersection_area(self, other: "BoundingBox") -> int:
        iw = min(self.right, other.right) - max(self.x, other.x)
        ih = min(self.bottom, other.bottom) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0
        return iw * ih

    def intersects(self, other: "BoundingBox") -> bool:
        return self.intersection_area(other) > 0

    def union(self, other: "BoundingBox") -> "BoundingBox":
        x, y = min(self.x, other.x), min(self.y, other.y)
        return BoundingBox.of(x, y, max(self.right, other.right) - x, max(self.bottom, other.bottom) - y)

    def __str__(self) -> str:
        return f"({self.x},{self.y},{self.w},{self.h})"


def clamp_bounds(x: int, y: int, w: int, h: int, width: int, height: int) -> Optional[BoundingBox]:
    """Clip a raw rectangle to the screen. Returns None if nothing is left."""
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    if x1 - x0 < 1 or y1 - y0 < 1:
        return None
    return BoundingBox.of(x0, y0, x1 - x0, y1 - y0)


class ComponentType(str, Enum):
    TEXT = "TEXT"
    BUTTON = "BUTTON"
    IMAGE = "IMAGE"
    INPUT = "INPUT"
    CONTAINER = "CONTAINER"
    OTHER = "OTHER"

    @classmethod
    def from_label(cls, label: Optional[str]) -> "ComponentType":
        if not label:
            return cls.OTHER
        try:
            return cls(label.strip().upper())
        except ValueError:
            return cls.OTHER

    @property
    def carries_text(self) -> bool:
        return self in TEXT_TYPES


TEXT_TYPES = frozenset({ComponentType.TEXT, ComponentType.BUTTON, ComponentType.INPUT})


class GuiComponent(BaseModel):
    """One node of a screen's component tree."""

    model_config = ConfigDict(frozen=True)

    id: str
    ctype: ComponentType
    bounds: BoundingBox
    text: Optional[str] = None
    children: Tuple["GuiComponent", ...] = ()

    @property
    def is_container(self) -> bool:
        return len(self.children) > 0

    def walk(self) -> Iterator["GuiComponent"]:
        """Pre-order traversal, self first."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


GuiComponent.model_rebuild()


class ScreenHierarchy(BaseModel):
    """The hierarchical model of one screen."""

    model_config = ConfigDict(frozen=True)

    screen_w: int = Field(ge=1)
    screen_h: int = Field(ge=1)
    root: GuiComponent
    warnings: Tuple[str, ...] = ()

    def iter_components(self) -> Iterator[GuiComponent]:
        return self.root.walk()

    @property
    def node_count(self) -> int:
        return sum(1 for _ in self.iter_components())

    def find(self, component_id: str) -> Optional[GuiComponent]:
        for node in self.iter_components():
            if node.id == component_id:
                return node
        return None

    def parent_of(self, component_id: str) -> Optional[GuiComponent]:
        for node in self.iter_components():
            if any(child.id == component_id for child in node.children):
                return node
        return None


class Origin(str, Enum):
    MOCKUP = "MOCKUP"
    IMPLEMENTATION = "IMPLEMENTATION"


@dataclass(frozen=True, eq=False)
class ScreenImage:
    """RGB8 screenshot. ``pixels`` is a read-only ``(height, width, 3)`` uint8 array."""

    pixels: np.ndarray

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ScreenImage":
        array = np.asarray(array)
        if array.ndim != 3 or array.shape[2] != 3:
            raise ValueError(f"expected an (h, w, 3) array, got shape {array.shape}")
        pixels = np.array(array, dtype=np.uint8, copy=True)
        pixels.setflags(write=False)
        return cls(pixels=pixels)

    @classmethod
    def blank(cls, width: int, height: int, color: RGB = (255, 255, 255)) -> "ScreenImage":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[:, :] = color
        return cls.from_array(pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def size(self) -> Tuple[int, int]:
        return (self.width, self.height)

    def pixel(self, x: int, y: int) -> RGB:
        r, g, b = self.pixels[y, x]
        return (int(r), int(g), int(b))

    def writable_copy(self) -> np.ndarray:
        return np.array(self.pixels, copy=True)

    def to_png_bytes(self) -> bytes:
        buffer = io.BytesIO()
        Image.fromarray(np.ascontiguousarray(self.pixels)).save(buffer, format="PNG")
        return buffer.getvalue()

    def save_png(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_bytes(self.to_png_bytes())
        return path

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScreenImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"ScreenImage({self.width}x{self.height})"


@dataclass(frozen=True)
class ScreenPair:
    """A hierarchy and screenshot known to describe the same screen."""

    hierarchy: ScreenHierarchy
    image: ScreenImage
    origin: Origin
    source: str = ""


# ---------------------------------------------------------------------------
# Metadata documents
# ---------------------------------------------------------------------------


class _ComponentDocument(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: str = Field(min_length=1)
    type: Optional[str] = None
    bounds: List[int] = Field(min_length=4, max_length=4)
    text: Optional[str] = None
    visible: bool = True
    children: List["_ComponentDocument"] = Field(default_factory=list)


_ComponentDocument.model_rebuild()


class _ScreenDocument(BaseModel):
    model_config = ConfigDict(extra="ignore")

    width: int = Field(ge=1)
    height: int = Field(ge=1)
    root: Optional[_ComponentDocument] = None


class _MetaDocument(BaseModel):
    model_config = ConfigDict(extra="ignore")

    screen: _ScreenDocument


def _schema_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


def _check_unique_ids(root: _ComponentDocument) -> None:
    seen: Set[str] = set()
    stack = [root]
    while stack:
        doc = stack.pop()
        if doc.id in seen:
            raise SchemaViolation(f"duplicate component id {doc.id!r}", component_id=doc.id)
        seen.add(doc.id)
        stack.extend(doc.children)


def _build_component(
    doc: _ComponentDocument, width: int, height: int, warnings: List[str]
) -> GuiComponent:
    x, y, w, h = doc.bounds
    if w < 1 or h < 1:
        raise SchemaViolation(
            f"component {doc.id!r} has nonpositive size {w}x{h}", component_id=doc.id
        )
    bounds = clamp_bounds(x, y, w, h, width, height)
    if bounds is None:
        raise SchemaViolation(
            f"component {doc.id!r} bounds ({x},{y},{w},{h}) lie outside the {width}x{height} screen",
            component_id=doc.id,
        )
    if bounds.as_tuple() != (x, y, w, h):
        message = f"component {doc.id!r}: bounds ({x},{y},{w},{h}) clamped to {bounds}"
        logger.warning(message)
        warnings.append(message)

    children = []
    for child in doc.children:
        if not child.visible:
            message = f"component {child.id!r}: invisible, dropped with its subtree"
            logger.debug(message)
            warnings.append(message)
            continue
        children.append(_build_component(child, width, height, warnings))

    ctype = ComponentType.from_label(doc.type)
    return GuiComponent(
        id=doc.id,
        ctype=ctype,
        bounds=bounds,
        text=doc.text if ctype.carries_text else None,
        children=tuple(children),
    )


def parse_screen_meta(data: Union[bytes, str]) -> ScreenHierarchy:
    """Parse a metadata document into a validated hierarchy.

    Out-of-screen bounds are clamped with a warning; invisible components are dropped.
    The root always spans the whole screen.
    """
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"line {e.lineno} column {e.colno}: {e.msg}")
    except UnicodeDecodeError as e:
        raise MalformedDocument(f"metadata is not valid UTF-8 ({e.reason})")

    if isinstance(raw, dict) and isinstance(raw.get("screen"), dict) and raw["screen"].get("root") is None:
        raise EmptyScreen("metadata document has no root component")
    try:
        document = _MetaDocument.model_validate(raw)
    except ValidationError as e:
        raise SchemaViolation(_schema_message(e))

    screen = document.screen
    root_doc = screen.root
    if root_doc is None or not root_doc.visible:
        raise EmptyScreen("metadata document has no visible root component")
    _check_unique_ids(root_doc)

    warnings: List[str] = []
    full_screen = [0, 0, screen.width, screen.height]
    if root_doc.bounds != full_screen:
        message = f"root {root_doc.id!r}: bounds {tuple(root_doc.bounds)} normalized to the full screen"
        logger.warning(message)
        warnings.append(message)
        root_doc = root_doc.model_copy(update={"bounds": full_screen})

    root = _build_component(root_doc, screen.width, screen.height, warnings)
    hierarchy = ScreenHierarchy(
        screen_w=screen.width, screen_h=screen.height, root=root, warnings=tuple(warnings)
    )
    logger.debug(f"Parsed hierarchy {screen.width}x{screen.height} with {hierarchy.node_count} nodes")
    return hierarchy


def _component_to_document(component: GuiComponent) -> Dict[str, object]:
    document: Dict[str, object] = {
        "id": component.id,
        "type": component.ctype.value,
        "bounds": list(component.bounds.as_tuple()),
    }
    if component.text is not None:
        document["text"] = component.text
    if component.children:
        document["children"] = [_component_to_document(c) for c in component.children]
    return document


def dump_screen_meta(hierarchy: ScreenHierarchy) -> bytes:
    """Serialize a hierarchy into the metadata document schema."""
    document = {
        "screen": {
            "width": hierarchy.screen_w,
            "height": hierarchy.screen_h,
            "root": _component_to_document(hierarchy.root),
        }
    }
    return json.dumps(document, indent=2, ensure_ascii=False).encode("utf-8")


# ---------------------------------------------------------------------------
# Screenshots
# ---------------------------------------------------------------------------


def _composite_over_white(rgba: np.ndarray) -> np.ndarray:
    # a*c + (1-a)*255 per channel, rounded half up, in exact integer arithmetic
    alpha = rgba[..., 3:4].astype(np.uint32)
    color = rgba[..., :3].astype(np.uint32)
    numerator = alpha * color + (255 - alpha) * 255
    return ((2 * numerator + 255) // 510).astype(np.uint8)


def load_screen_image(data: bytes) -> ScreenImage:
    """Decode a PNG into an RGB8 grid. Alpha is composited over white."""
    try:
        with Image.open(io.BytesIO(data)) as image:
            if image.format != "PNG":
                raise DecodeError(f"expected a PNG document, got {image.format or 'unknown'}")
            if image.width == 0 or image.height == 0:
                raise ZeroDimension(f"image has zero dimension {image.width}x{image.height}")
            image.load()
            has_alpha = image.mode in ("RGBA", "LA", "PA") or "transparency" in image.info
            if has_alpha:
                array = _composite_over_white(np.asarray(image.convert("RGBA")))
            else:
                array = np.asarray(image.convert("RGB"))
    except (
        UnidentifiedImageError,
        Image.DecompressionBombError,
        OSError,
        SyntaxError,
        ValueError,
        EOFError,
    ) as e:
        raise DecodeError(f"cannot decode PNG: {e}")
    if array.shape[0] == 0 or array.shape[1] == 0:
        raise ZeroDimension("image has zero dimension")
    return ScreenImage.from_array(array)


def validate_pair(
    hierarchy: ScreenHierarchy, image: ScreenImage, origin: Origin, source: str = ""
) -> ScreenPair:
    """Link a hierarchy to its screenshot; sizes must agree exactly."""
    if (hierarchy.screen_w, hierarchy.screen_h) != (image.width, image.height):
        raise DimensionMismatch(
            (hierarchy.screen_w, hierarchy.screen_h), (image.width, image.height), origin.value
        )
    return ScreenPair(hierarchy=hierarchy, image=image, origin=origin, source=source)


def _read_bytes(path: Union[str, Path]) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise IOFailure(f"cannot read {path}: {e.strerror or e}", path=str(path))


def load_screen_pair(
    image_path: Union[str, Path], meta_path: Union[str, Path], origin: Origin
) -> ScreenPair:
    """Read, parse and validate one screen from its two files."""
    hierarchy = parse_screen_meta(_read_bytes(meta_path))
    image = load_screen_image(_read_bytes(image_path))
    pair = validate_pair(hierarchy, image, origin, source=str(image_path))
    logger.info(f"Loaded {origin.value.lower()} screen {image.width}x{image.height} from {image_path}")
    return pair


def leaf_components(hierarchy: ScreenHierarchy) -> List[GuiComponent]:
    """Leaves below the root in pre-order. The root itself never counts."""
    return [node for node in hierarchy.iter_components() if node is not hierarchy.root and not node.is_container]


def crop(image: ScreenImage, bounds: BoundingBox) -> ScreenImage:
    """Exact pixel copy of the region under ``bounds``."""
    if not bounds.fits(image.width, image.height):
        raise OutOfBounds(f"region {bounds} exceeds the {image.width}x{image.height} image")
    return ScreenImage.from_array(image.pixels[bounds.y : bounds.bottom, bounds.x : bounds.right])
