"""Ground-truth corpora: known design violations injected into clean screen pairs.

Every mutation touches only the target's old and new regions, so the rest of the
implementation screen stays bit-identical to the clean one. Magnitudes default to the
detector tolerance times ``Config.injection_margin``.
"""
import dataclasses
import logging
import math
import random
import string
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.errors import (
    InsufficientTargets,
    IOFailure,
    MalformedDocument,
    MutationOutOfBounds,
    TargetNotFound,
)
from app.model import (
    RGB,
    BoundingBox,
    GuiComponent,
    Origin,
    ScreenHierarchy,
    ScreenImage,
    ScreenPair,
    dump_screen_meta,
    leaf_components,
    load_screen_pair,
)
from app.percept import BIN_COUNT, bin_centroid, bin_indices, resample_nearest, rgb_array_to_lab
from app.report import ViolationReport
from app.utils.config import Config
from app.utils.manifest import GroundTruth, PairRecord, read_manifest, write_manifest
from app.utils.render import MARGIN, glyph_cell, render_text_block
from app.violations import CATEGORY_ORDER, ViolationCategory

logger = logging.getLogger(__name__)

EXTRA_GAP = 4
IMAGE_NOISE_COLORS = 4


class InjectionSpec(BaseModel):
    """One requested mutation. ``magnitude`` None means the default for the category."""

    model_config = ConfigDict(frozen=True)

    category: ViolationCategory
    target_id: str
    magnitude: Optional[float] = None


@dataclass(frozen=True)
class InjectedCase:
    mockup: ScreenPair
    impl: ScreenPair
    ground_truth: Tuple[GroundTruth, ...]
    specs: Tuple[InjectionSpec, ...] = ()
    name: str = "case"


def default_magnitude(category: ViolationCategory, cfg: Optional[Config] = None) -> float:
    """Tolerance times the injection margin, floored so a zero tolerance still gets exceeded.

    Layout magnitudes are whole pixels. TEXT_CONTENT counts replaced characters.
    """
    cfg = cfg or Config()
    k = cfg.injection_margin
    if category is ViolationCategory.LAYOUT_TRANSLATION:
        return float(max(1, math.ceil(k * cfg.pos_tol)))
    if category is ViolationCategory.LAYOUT_RESIZE:
        return float(max(1, math.ceil(k * cfg.size_tol)))
    if category is ViolationCategory.TEXT_COLOR:
        return max(1.0, k * cfg.text_color_tol)
    if category is ViolationCategory.RESOURCE_COLOR:
        return max(1.0, k * cfg.color_tol)
    if category is ViolationCategory.TEXT_SIZE:
        return max(0.05, k * cfg.text_size_tol)
    if category is ViolationCategory.RESOURCE_IMAGE:
        return min(1.0, max(0.05, k * cfg.image_tol))
    return 1.0


# ---------------------------------------------------------------------------
# Pixel helpers
# ---------------------------------------------------------------------------


def _pack(pixels: np.ndarray) -> np.ndarray:
    p = pixels.reshape(-1, 3).astype(np.int64)
    return (p[:, 0] << 16) | (p[:, 1] << 8) | p[:, 2]


def _unpack(value: int) -> RGB:
    return ((value >> 16) & 0xFF, (value >> 8) & 0xFF, value & 0xFF)


def _palette(pixels: np.ndarray) -> List[Tuple[RGB, int]]:
    """Exact colors with their counts, most frequent first, ties by color value."""
    values, counts = np.unique(_pack(pixels), return_counts=True)
    order = sorted(range(len(values)), key=lambda n: (-int(counts[n]), int(values[n])))
    return [(_unpack(int(values[n])), int(counts[n])) for n in order]


def _ranked_bins(region: np.ndarray) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    bins = bin_indices(region)
    counts = np.bincount(bins.ravel(), minlength=BIN_COUNT)
    ranked = sorted(np.flatnonzero(counts).tolist(), key=lambda i: (-int(counts[i]), i))
    return bins, counts, ranked


def _ring_color(pixels: np.ndarray, b: BoundingBox) -> RGB:
    """Most frequent color of the 1-px ring around ``b``."""
    height, width = pixels.shape[:2]
    x0, y0 = max(0, b.x - 1), max(0, b.y - 1)
    x1, y1 = min(width, b.right + 1), min(height, b.bottom + 1)
    window = pixels[y0:y1, x0:x1]
    mask = np.ones(window.shape[:2], dtype=bool)
    mask[b.y - y0 : b.bottom - y0, b.x - x0 : b.right - x0] = False
    ring = window[mask]
    if ring.size == 0:
        return _palette(pixels)[0][0]
    return _palette(ring)[0][0]


@lru_cache(maxsize=1)
def _centroid_lab() -> np.ndarray:
    centroids = np.array([bin_centroid(i) for i in range(BIN_COUNT)], dtype=np.float64)
    return rgb_array_to_lab(centroids)


def _pick_colors(
    rng: random.Random,
    avoid_bins: Set[int],
    away_from: Sequence[RGB],
    min_delta: float,
    count: int = 1,
) -> List[RGB]:
    """Distinct bin centroids at least ``min_delta`` (CIE76) from every color in ``away_from``."""
    lab = _centroid_lab()
    ok = np.ones(BIN_COUNT, dtype=bool)
    if away_from:
        reference = rgb_array_to_lab(np.array(away_from, dtype=np.float64))
        for color in reference:
            ok &= np.sqrt(((lab - color) ** 2).sum(axis=1)) >= min_delta
    if avoid_bins:
        ok[sorted(avoid_bins)] = False
    candidates = np.flatnonzero(ok).tolist()
    if len(candidates) < count:
        raise MutationOutOfBounds(f"no {count} color(s) at delta-E >= {min_delta:g} available")
    return [bin_centroid(i) for i in rng.sample(candidates, count)]


# ---------------------------------------------------------------------------
# Mutation workspace
# ---------------------------------------------------------------------------


def _rebuild(node: GuiComponent, target_id: str, replacements: Sequence[GuiComponent]) -> GuiComponent:
    children: List[GuiComponent] = []
    for child in node.children:
        if child.id == target_id:
            children.extend(replacements)
        else:
            children.append(_rebuild(child, target_id, replacements))
    return node.model_copy(update={"children": tuple(children)})


@dataclass
class _Workspace:
    hierarchy: ScreenHierarchy
    pixels: np.ndarray
    rng: random.Random
    cfg: Config
    ground_truth: List[GroundTruth] = field(default_factory=list)

    @classmethod
    def start(cls, clean: ScreenPair, rng: random.Random, cfg: Config) -> "_Workspace":
        return cls(hierarchy=clean.hierarchy, pixels=clean.image.writable_copy(), rng=rng, cfg=cfg)

    def leaf(self, target_id: str) -> GuiComponent:
        node = self.hierarchy.find(target_id)
        if node is None:
            raise TargetNotFound(f"no component {target_id!r} in the screen", target_id=target_id)
        if node is self.hierarchy.root or node.is_container:
            raise TargetNotFound(f"component {target_id!r} is not a leaf", target_id=target_id)
        return node

    def place(self, x: int, y: int, w: int, h: int, ignore_id: Optional[str]) -> BoundingBox:
        """Validate a new box: on-screen and clear of every leaf except ``ignore_id``."""
        screen_w, screen_h = self.hierarchy.screen_w, self.hierarchy.screen_h
        if w < 1 or h < 1 or x < 0 or y < 0 or x + w > screen_w or y + h > screen_h:
            raise MutationOutOfBounds(
                f"box ({x},{y},{w},{h}) leaves the {screen_w}x{screen_h} screen", bounds=[x, y, w, h]
            )
        box = BoundingBox.of(x, y, w, h)
        for other in leaf_components(self.hierarchy):
            if other.id != ignore_id and box.intersects(other.bounds):
                raise MutationOutOfBounds(
                    f"box {box} would overlap component {other.id!r}", bounds=[x, y, w, h]
                )
        return box

    def region(self, b: BoundingBox) -> np.ndarray:
        """Writable view of the pixels under ``b``."""
        return self.pixels[b.y : b.bottom, b.x : b.right]

    def replace(self, target_id: str, replacements: Sequence[GuiComponent]) -> None:
        root = _rebuild(self.hierarchy.root, target_id, replacements)
        self.hierarchy = self.hierarchy.model_copy(update={"root": root})

    def expect(
        self, category: ViolationCategory, mockup_id: Optional[str], impl_id: Optional[str]
    ) -> None:
        self.ground_truth.append(GroundTruth(category=category, mockup_id=mockup_id, impl_id=impl_id))


def _require_resource(target: GuiComponent) -> None:
    if target.ctype.carries_text:
        raise MutationOutOfBounds(f"component {target.id!r} is a text component")


def _require_text(target: GuiComponent) -> str:
    if not target.ctype.carries_text or not target.text or target.text.isspace():
        raise MutationOutOfBounds(f"component {target.id!r} carries no text")
    return target.text


def _text_colors(region: np.ndarray) -> Tuple[RGB, RGB]:
    """(foreground, background) as exact colors of a text box."""
    palette = _palette(region)
    background = palette[0][0]
    return (palette[1][0] if len(palette) > 1 else background), background


# ---------------------------------------------------------------------------
# Mutations, one per category
# ---------------------------------------------------------------------------


def _translate(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    b = target.bounds
    moved = ws.place(b.x + int(round(magnitude)), b.y, b.w, b.h, ignore_id=target.id)
    content = ws.region(b).copy()
    ws.region(b)[:] = _ring_color(ws.pixels, b)
    ws.region(moved)[:] = content
    ws.replace(target.id, [target.model_copy(update={"bounds": moved})])
    ws.expect(ViolationCategory.LAYOUT_TRANSLATION, target.id, target.id)


def _resize(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    b = target.bounds
    resized = ws.place(b.x, b.y, b.w + int(round(magnitude)), b.h, ignore_id=target.id)
    scaled = resample_nearest(ScreenImage.from_array(ws.region(b)), resized.w, resized.h)
    ws.region(b)[:] = _ring_color(ws.pixels, b)
    ws.region(resized)[:] = scaled.pixels
    ws.replace(target.id, [target.model_copy(update={"bounds": resized})])
    ws.expect(ViolationCategory.LAYOUT_RESIZE, target.id, target.id)


def _rewrite_text(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    text = _require_text(target)
    positions = [k for k, char in enumerate(text) if not char.isspace()]
    edits = min(len(positions), max(1, int(round(magnitude))))
    chosen = sorted(ws.rng.sample(positions, edits))
    chars = list(text)
    for k in chosen:
        chars[k] = ws.rng.choice([c for c in string.ascii_letters if c != chars[k]])

    # redraw the placeholder glyph of every rewritten character
    b = target.bounds
    fg, _ = _text_colors(ws.region(b))
    cell_w, glyph_w, glyph_h, top = glyph_cell(b, len(text))
    for k in chosen:
        left = b.x + MARGIN + k * cell_w
        right = min(left + glyph_w, b.right)
        if left < right:
            ws.pixels[top : top + glyph_h, left:right] = fg

    ws.replace(target.id, [target.model_copy(update={"text": "".join(chars)})])
    ws.expect(ViolationCategory.TEXT_CONTENT, target.id, target.id)


def _recolor_text(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    if not target.ctype.carries_text:
        raise MutationOutOfBounds(f"component {target.id!r} is not a text component")
    region = ws.region(target.bounds)
    bins, counts, ranked = _ranked_bins(region)
    if len(ranked) < 2:
        raise MutationOutOfBounds(f"component {target.id!r} has no foreground color")
    background, foreground = ranked[0], ranked[1]
    if 2 * int(counts[background]) <= bins.size:
        raise MutationOutOfBounds(f"component {target.id!r} has no dominant background")
    new_color = _pick_colors(
        ws.rng, set(ranked), [bin_centroid(foreground), bin_centroid(background)], magnitude
    )[0]
    region[bins != background] = new_color
    ws.expect(ViolationCategory.TEXT_COLOR, target.id, target.id)


def _resize_text(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    text = _require_text(target)
    b = target.bounds
    new_h = math.ceil(b.h * (1.0 + magnitude) - 1e-9)
    resized = ws.place(b.x, b.y, b.w, new_h, ignore_id=target.id)
    fg, bg = _text_colors(ws.region(b))
    render_text_block(ws.pixels, resized, text, fg, bg)
    ws.replace(target.id, [target.model_copy(update={"bounds": resized})])
    ws.expect(ViolationCategory.TEXT_SIZE, target.id, target.id)
    # a taller box is also a resize once it passes the layout tolerance
    if abs(new_h - b.h) > ws.cfg.size_tol:
        ws.expect(ViolationCategory.LAYOUT_RESIZE, target.id, target.id)


def _remove(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    parent = ws.hierarchy.parent_of(target.id)
    if parent is not None and parent is not ws.hierarchy.root and len(parent.children) < 2:
        raise MutationOutOfBounds(f"removing {target.id!r} would turn {parent.id!r} into a leaf")
    ws.region(target.bounds)[:] = _palette(ws.pixels)[0][0]
    ws.replace(target.id, [])
    ws.expect(ViolationCategory.RESOURCE_MISSING, target.id, None)


def _duplicate(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    b = target.bounds
    spots = [
        (b.x, b.bottom + EXTRA_GAP),
        (b.x, b.y - EXTRA_GAP - b.h),
        (b.right + EXTRA_GAP, b.y),
        (b.x - EXTRA_GAP - b.w, b.y),
    ]
    clone_box = None
    for x, y in spots:
        try:
            clone_box = ws.place(x, y, b.w, b.h, ignore_id=None)
            break
        except MutationOutOfBounds:
            continue
    if clone_box is None:
        raise MutationOutOfBounds(f"no free space next to {target.id!r} for a copy")

    clone_id = f"{target.id}-extra"
    n = 2
    while ws.hierarchy.find(clone_id) is not None:
        clone_id = f"{target.id}-extra{n}"
        n += 1
    ws.region(clone_box)[:] = ws.region(b)
    clone = target.model_copy(update={"id": clone_id, "bounds": clone_box})
    ws.replace(target.id, [target, clone])
    ws.expect(ViolationCategory.RESOURCE_EXTRA, None, clone_id)


def _recolor_resource(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    _require_resource(target)
    region = ws.region(target.bounds)
    bins, counts, ranked = _ranked_bins(region)
    dominant = ranked[0]
    if len(ranked) > 1 and counts[ranked[1]] == counts[dominant]:
        raise MutationOutOfBounds(f"component {target.id!r} has no unique dominant color")
    new_color = _pick_colors(ws.rng, set(ranked), [bin_centroid(dominant)], magnitude)[0]
    region[bins == dominant] = new_color
    ws.expect(ViolationCategory.RESOURCE_COLOR, target.id, target.id)


def _perturb_resource(ws: _Workspace, target: GuiComponent, magnitude: float) -> None:
    """Repaint a fraction of the pixels while the dominant color keeps its lead."""
    _require_resource(target)
    region = ws.region(target.bounds)
    bins, counts, ranked = _ranked_bins(region)
    dominant = ranked[0]
    flat = bins.ravel()
    altered = min(flat.size, math.ceil(magnitude * flat.size - 1e-9))

    # minority pixels go first so the dominant bin loses as little as possible
    minority = np.flatnonzero(flat != dominant).tolist()
    majority = np.flatnonzero(flat == dominant).tolist()
    ws.rng.shuffle(minority)
    ws.rng.shuffle(majority)
    chosen = np.array((minority + majority)[:altered], dtype=np.int64)

    remaining = counts - np.bincount(flat[chosen], minlength=BIN_COUNT)
    largest_new = math.ceil(altered / IMAGE_NOISE_COLORS)
    rivals = np.delete(remaining, dominant)
    if remaining[dominant] <= max(largest_new, int(rivals.max(initial=0))):
        raise MutationOutOfBounds(
            f"repainting {magnitude:g} of {target.id!r} would change its dominant color"
        )

    present = [color for color, _ in _palette(region)]
    min_delta = ws.cfg.injection_margin * max(ws.cfg.jnd, ws.cfg.color_tol)
    colors = _pick_colors(ws.rng, set(ranked), present, min_delta, IMAGE_NOISE_COLORS)
    ys, xs = np.divmod(chosen, target.bounds.w)
    for n, color in enumerate(colors):
        region[ys[n::IMAGE_NOISE_COLORS], xs[n::IMAGE_NOISE_COLORS]] = color
    ws.expect(ViolationCategory.RESOURCE_IMAGE, target.id, target.id)


_MUTATIONS: Dict[ViolationCategory, Callable[[_Workspace, GuiComponent, float], None]] = {
    ViolationCategory.LAYOUT_TRANSLATION: _translate,
    ViolationCategory.LAYOUT_RESIZE: _resize,
    ViolationCategory.TEXT_CONTENT: _rewrite_text,
    ViolationCategory.TEXT_COLOR: _recolor_text,
    ViolationCategory.TEXT_SIZE: _resize_text,
    ViolationCategory.RESOURCE_MISSING: _remove,
    ViolationCategory.RESOURCE_EXTRA: _duplicate,
    ViolationCategory.RESOURCE_COLOR: _recolor_resource,
    ViolationCategory.RESOURCE_IMAGE: _perturb_resource,
}


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def inject_many(
    clean: ScreenPair, specs: Sequence[InjectionSpec], seed: int, cfg: Optional[Config] = None
) -> InjectedCase:
    """Apply several mutations, in order, to one copy of ``clean``."""
    cfg = cfg or Config()
    ws = _Workspace.start(clean, random.Random(seed), cfg)
    applied: List[InjectionSpec] = []
    seen: Set[str] = set()
    for spec in specs:
        if spec.target_id in seen:
            raise MutationOutOfBounds(f"component {spec.target_id!r} is mutated twice")
        seen.add(spec.target_id)
        target = ws.leaf(spec.target_id)
        floor = default_magnitude(spec.category, cfg)
        magnitude = spec.magnitude if spec.magnitude is not None else floor
        if abs(magnitude) < floor - 1e-9:
            # a smaller change would sit within tolerance and its ground truth would be unreachable
            raise MutationOutOfBounds(
                f"{spec.category.value} magnitude {magnitude:g} on {spec.target_id!r} is below {floor:g}",
                category=spec.category.value,
                magnitude=magnitude,
                minimum=floor,
            )
        _MUTATIONS[spec.category](ws, target, magnitude)
        applied.append(spec.model_copy(update={"magnitude": magnitude}))
        logger.debug(f"Injected {spec.category.value} on {spec.target_id} (magnitude {magnitude:g})")

    labels = "+".join(f"{s.category.value}:{s.target_id}" for s in applied)
    impl = ScreenPair(
        hierarchy=ws.hierarchy,
        image=ScreenImage.from_array(ws.pixels),
        origin=Origin.IMPLEMENTATION,
        source=f"{clean.source}#{labels}",
    )
    return InjectedCase(
        mockup=dataclasses.replace(clean, origin=Origin.MOCKUP),
        impl=impl,
        ground_truth=tuple(ws.ground_truth),
        specs=tuple(applied),
    )


def inject(clean: ScreenPair, spec: InjectionSpec, seed: int, cfg: Optional[Config] = None) -> InjectedCase:
    """Apply one mutation to a copy of ``clean``."""
    return inject_many(clean, [spec], seed, cfg)


def eligible_targets(
    clean: ScreenPair, category: ViolationCategory, cfg: Optional[Config] = None
) -> List[str]:
    """Leaves, in pre-order, on which ``category`` can be injected with its default magnitude."""
    cfg = cfg or Config()
    magnitude = default_magnitude(category, cfg)
    eligible = []
    for leaf in leaf_components(clean.hierarchy):
        ws = _Workspace.start(clean, random.Random(0), cfg)
        try:
            _MUTATIONS[category](ws, leaf, magnitude)
        except MutationOutOfBounds:
            continue
        eligible.append(leaf.id)
    return eligible


class _TargetPool:
    """Shuffled targets handed out in turn, reshuffled once exhausted."""

    def __init__(self, targets: Sequence[str], rng: random.Random):
        self.targets = list(targets)
        self.rng = rng
        self.queue: List[str] = []

    def draw(self, k: int) -> List[str]:
        picked: List[str] = []
        while len(picked) < k:
            if not self.queue:
                self.queue = list(self.targets)
                self.rng.shuffle(self.queue)
            target = self.queue.pop(0)
            if target not in picked:
                picked.append(target)
        return picked


def generate_suite(
    clean: ScreenPair,
    counts: Mapping[Union[ViolationCategory, str], int],
    seed: int,
    per_case: int = 1,
    cfg: Optional[Config] = None,
) -> List[InjectedCase]:
    """Build ``counts[category]`` cases per category, ``per_case`` mutations each.

    Deterministic in (clean, counts, seed). Targets inside a case are distinct.
    """
    if per_case < 1:
        raise ValueError("per_case must be at least 1")
    rng = random.Random(seed)
    wanted = {ViolationCategory(c): int(n) for c, n in counts.items()}
    cases: List[InjectedCase] = []
    for category in CATEGORY_ORDER:
        count = wanted.get(category, 0)
        if count <= 0:
            continue
        eligible = eligible_targets(clean, category, cfg)
        if len(eligible) < per_case:
            raise InsufficientTargets(
                f"{category.value} needs {per_case} eligible target(s), the screen has {len(eligible)}",
                category=category.value,
                eligible=len(eligible),
            )
        pool = _TargetPool(eligible, rng)
        for n in range(count):
            specs = [InjectionSpec(category=category, target_id=t) for t in pool.draw(per_case)]
            case = inject_many(clean, specs, rng.getrandbits(32), cfg)
            cases.append(dataclasses.replace(case, name=f"{category.value.lower()}_{n:03d}"))
    logger.info(f"Generated {len(cases)} injected case(s) with seed {seed}")
    return cases


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


class CategoryScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: ViolationCategory
    true_positives: int = Field(0, ge=0)
    false_positives: int = Field(0, ge=0)
    false_negatives: int = Field(0, ge=0)

    @property
    def precision(self) -> float:
        found = self.true_positives + self.false_positives
        return self.true_positives / found if found else 1.0

    @property
    def recall(self) -> float:
        expected = self.true_positives + self.false_negatives
        return self.true_positives / expected if expected else 1.0

    @property
    def support(self) -> int:
        return self.true_positives + self.false_negatives


def score_suite(
    cases: Sequence[InjectedCase], reports: Sequence[ViolationReport]
) -> Dict[ViolationCategory, CategoryScore]:
    """Per-category precision/recall of reported violations against the cases' ground truth.

    A violation counts as found when category and both component ids agree.
    """
    if len(cases) != len(reports):
        raise ValueError(f"{len(cases)} cases but {len(reports)} reports")
    tally = {c: [0, 0, 0] for c in CATEGORY_ORDER}
    for case, report in zip(cases, reports):
        expected = {g.key for g in case.ground_truth}
        found = {(v.category, v.mockup_id, v.impl_id) for v in report.violations}
        for key in found & expected:
            tally[key[0]][0] += 1
        for key in found - expected:
            tally[key[0]][1] += 1
        for key in expected - found:
            tally[key[0]][2] += 1
    return {
        c: CategoryScore(category=c, true_positives=tp, false_positives=fp, false_negatives=fn)
        for c, (tp, fp, fn) in tally.items()
    }


# ---------------------------------------------------------------------------
# Suite files
# ---------------------------------------------------------------------------


def write_suite(cases: Sequence[InjectedCase], outdir: Union[str, Path]) -> Path:
    """Write every case as PNG + metadata files and a ``suite.json`` manifest.

    Manifest records are valid batch records that also carry ``ground_truth``.
    """
    outdir = Path(outdir)
    records = []
    try:
        for case in cases:
            case_dir = outdir / case.name
            case_dir.mkdir(parents=True, exist_ok=True)
            for stem, pair in (("mockup", case.mockup), ("impl", case.impl)):
                pair.image.save_png(case_dir / f"{stem}.png")
                (case_dir / f"{stem}.json").write_bytes(dump_screen_meta(pair.hierarchy))
            records.append(
                PairRecord(
                    name=case.name,
                    mock_img=f"{case.name}/mockup.png",
                    mock_meta=f"{case.name}/mockup.json",
                    impl_img=f"{case.name}/impl.png",
                    impl_meta=f"{case.name}/impl.json",
                    ground_truth=list(case.ground_truth),
                )
            )
    except OSError as e:
        raise IOFailure(f"cannot write suite to {outdir}: {e.strerror or e}", path=str(outdir))
    manifest = write_manifest(records, outdir / "suite.json")
    logger.info(f"Wrote {len(records)} case(s) to {outdir}")
    return manifest


def load_suite(path: Union[str, Path]) -> List[InjectedCase]:
    cases = []
    for record in read_manifest(path):
        if record.ground_truth is None:
            raise MalformedDocument(f"{path}: pair {record.name!r} has no ground_truth")
        cases.append(
            InjectedCase(
                mockup=load_screen_pair(record.mock_img, record.mock_meta, Origin.MOCKUP),
                impl=load_screen_pair(record.impl_img, record.impl_meta, Origin.IMPLEMENTATION),
                ground_truth=tuple(record.ground_truth),
                name=record.name,
            )
        )
    return cases
