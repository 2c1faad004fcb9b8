"""GUI design violation taxonomy, detectors and the end-to-end comparison.

Nine categories in three families:

* layout:   LAYOUT_TRANSLATION, LAYOUT_RESIZE
* text:     TEXT_CONTENT, TEXT_COLOR, TEXT_SIZE
* resource: RESOURCE_MISSING, RESOURCE_EXTRA, RESOURCE_COLOR, RESOURCE_IMAGE
"""
import logging
from datetime import datetime
from enum import Enum
from typing import TYPE_CHECKING, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.matching import MatchResult, match_components, text_similarity
from app.model import (
    BoundingBox,
    GuiComponent,
    ScreenHierarchy,
    ScreenImage,
    ScreenPair,
    clamp_bounds,
    crop,
    leaf_components,
)
from app.percept import (
    color_histogram,
    dominant_color,
    foreground_background,
    histogram_intersection,
    perceptual_region_diff,
    rgb_delta_e,
)
from app.utils.config import Config
from app.utils.numeric import round_sig

if TYPE_CHECKING:
    from app.report import ViolationReport

logger = logging.getLogger(__name__)


class ViolationFamily(str, Enum):
    LAYOUT = "layout"
    TEXT = "text"
    RESOURCE = "resource"


class ViolationCategory(str, Enum):
    LAYOUT_TRANSLATION = "LAYOUT_TRANSLATION"
    LAYOUT_RESIZE = "LAYOUT_RESIZE"
    TEXT_CONTENT = "TEXT_CONTENT"
    TEXT_COLOR = "TEXT_COLOR"
    TEXT_SIZE = "TEXT_SIZE"
    RESOURCE_MISSING = "RESOURCE_MISSING"
    RESOURCE_EXTRA = "RESOURCE_EXTRA"
    RESOURCE_COLOR = "RESOURCE_COLOR"
    RESOURCE_IMAGE = "RESOURCE_IMAGE"

    @property
    def family(self) -> ViolationFamily:
        return ViolationFamily(self.value.split("_", 1)[0].lower())

    @property
    def rank(self) -> int:
        return CATEGORY_ORDER.index(self)


CATEGORY_ORDER = list(ViolationCategory)


class Evidence(BaseModel):
    """Regions of each screenshot that show the violation."""

    model_config = ConfigDict(frozen=True)

    mockup_region: Optional[BoundingBox] = None
    impl_region: Optional[BoundingBox] = None


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: ViolationCategory
    mockup_id: Optional[str] = None
    impl_id: Optional[str] = None
    metrics: Dict[str, float] = Field(default_factory=dict)
    severity: float = Field(ge=0.0, le=1.0)
    evidence: Evidence = Field(default_factory=Evidence)

    @field_validator("metrics")
    @classmethod
    def _round_metrics(cls, value: Dict[str, float]) -> Dict[str, float]:
        return {key: round_sig(value[key]) for key in sorted(value)}

    @field_validator("severity")
    @classmethod
    def _round_severity(cls, value: float) -> float:
        return round_sig(value)

    @model_validator(mode="after")
    def _ids_match_category(self) -> "Violation":
        if self.category is ViolationCategory.RESOURCE_MISSING:
            ok = self.mockup_id is not None and self.impl_id is None
        elif self.category is ViolationCategory.RESOURCE_EXTRA:
            ok = self.mockup_id is None and self.impl_id is not None
        else:
            ok = self.mockup_id is not None and self.impl_id is not None
        if not ok:
            raise ValueError(f"{self.category.value} has inconsistent component ids")
        return self


def _ramp(excess: float, scale: float) -> float:
    return min(1.0, max(0.0, excess / scale))


class ViolationDetector:
    """Runs the per-category detectors under one config."""

    def __init__(self, cfg: Optional[Config] = None):
        self.cfg = cfg or Config()

    def detect_layout(self, m: GuiComponent, i: GuiComponent) -> List[Violation]:
        cfg = self.cfg
        evidence = Evidence(mockup_region=m.bounds, impl_region=i.bounds)
        dx, dy = i.bounds.x - m.bounds.x, i.bounds.y - m.bounds.y
        dw, dh = i.bounds.w - m.bounds.w, i.bounds.h - m.bounds.h
        found = []

        shift = max(abs(dx), abs(dy))
        if shift > cfg.pos_tol:
            found.append(
                Violation(
                    category=ViolationCategory.LAYOUT_TRANSLATION,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"dx": dx, "dy": dy},
                    severity=_ramp(shift - cfg.pos_tol, cfg.severity.layout_px),
                    evidence=evidence,
                )
            )
        growth = max(abs(dw), abs(dh))
        if growth > cfg.size_tol:
            found.append(
                Violation(
                    category=ViolationCategory.LAYOUT_RESIZE,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"dw": dw, "dh": dh},
                    severity=_ramp(growth - cfg.size_tol, cfg.severity.layout_px),
                    evidence=evidence,
                )
            )
        return found

    def detect_text(
        self, m: GuiComponent, i: GuiComponent, crop_m: ScreenImage, crop_i: ScreenImage
    ) -> List[Violation]:
        cfg = self.cfg
        evidence = Evidence(mockup_region=m.bounds, impl_region=i.bounds)
        found = []

        text_sim = text_similarity(m.text, i.text)
        if text_sim < 1.0:
            found.append(
                Violation(
                    category=ViolationCategory.TEXT_CONTENT,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"text_sim": text_sim},
                    severity=1.0 - text_sim,
                    evidence=evidence,
                )
            )

        # the dominant bin is taken as background, the runner-up as the text color
        fg_m, _ = foreground_background(color_histogram(crop_m))
        fg_i, _ = foreground_background(color_histogram(crop_i))
        color_shift = rgb_delta_e(fg_m, fg_i, cfg.delta_e_formula)
        if color_shift > cfg.text_color_tol:
            found.append(
                Violation(
                    category=ViolationCategory.TEXT_COLOR,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"delta_e": color_shift},
                    severity=_ramp(color_shift - cfg.text_color_tol, cfg.severity.color_delta_e),
                    evidence=evidence,
                )
            )

        # box height stands in for font size
        ratio = i.bounds.h / m.bounds.h
        deviation = abs(ratio - 1.0)
        if deviation > cfg.text_size_tol:
            found.append(
                Violation(
                    category=ViolationCategory.TEXT_SIZE,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"height_ratio": ratio, "ratio_deviation": deviation},
                    severity=_ramp(deviation - cfg.text_size_tol, cfg.severity.text_size_ratio),
                    evidence=evidence,
                )
            )
        return found

    def detect_resource(
        self, m: GuiComponent, i: GuiComponent, crop_m: ScreenImage, crop_i: ScreenImage
    ) -> List[Violation]:
        cfg = self.cfg
        evidence = Evidence(mockup_region=m.bounds, impl_region=i.bounds)
        hist_m, hist_i = color_histogram(crop_m), color_histogram(crop_i)

        color_shift = rgb_delta_e(dominant_color(hist_m), dominant_color(hist_i), cfg.delta_e_formula)
        if color_shift > cfg.color_tol:
            # a dominant-color shift explains the pixel differences as well
            return [
                Violation(
                    category=ViolationCategory.RESOURCE_COLOR,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={"delta_e": color_shift},
                    severity=_ramp(color_shift - cfg.color_tol, cfg.severity.color_delta_e),
                    evidence=evidence,
                )
            ]

        diff = perceptual_region_diff(crop_m, crop_i, cfg.jnd, cfg.delta_e_formula)
        if diff.differing_fraction > cfg.image_tol:
            return [
                Violation(
                    category=ViolationCategory.RESOURCE_IMAGE,
                    mockup_id=m.id,
                    impl_id=i.id,
                    metrics={
                        "differing_fraction": diff.differing_fraction,
                        "mean_delta_e": diff.mean_delta_e,
                        "histogram_intersection": histogram_intersection(hist_m, hist_i),
                    },
                    severity=_ramp(diff.differing_fraction - cfg.image_tol, cfg.severity.image_fraction),
                    evidence=evidence,
                )
            ]
        return []

    def detect_presence(
        self,
        match_result: MatchResult,
        mock_hierarchy: Optional[ScreenHierarchy] = None,
        impl_hierarchy: Optional[ScreenHierarchy] = None,
    ) -> List[Violation]:
        """One RESOURCE_MISSING per unmatched mock-up leaf, one RESOURCE_EXTRA per unmatched
        implementation leaf, in the order of the unmatched lists.

        Evidence is filled in when the hierarchies are given.
        """
        found = []
        for mockup_id in match_result.unmatched_mockup:
            found.append(
                Violation(
                    category=ViolationCategory.RESOURCE_MISSING,
                    mockup_id=mockup_id,
                    severity=1.0,
                    evidence=_presence_evidence(mockup_id, mock_hierarchy, impl_hierarchy, own_side="mockup"),
                )
            )
        for impl_id in match_result.unmatched_impl:
            found.append(
                Violation(
                    category=ViolationCategory.RESOURCE_EXTRA,
                    impl_id=impl_id,
                    severity=1.0,
                    evidence=_presence_evidence(impl_id, impl_hierarchy, mock_hierarchy, own_side="impl"),
                )
            )
        return found

    def detect_pair(
        self, m: GuiComponent, i: GuiComponent, mock_image: ScreenImage, impl_image: ScreenImage
    ) -> List[Violation]:
        """Layout checks always; text or resource checks chosen by the mock-up's type."""
        found = self.detect_layout(m, i)
        crop_m, crop_i = crop(mock_image, m.bounds), crop(impl_image, i.bounds)
        if m.ctype.carries_text:
            found.extend(self.detect_text(m, i, crop_m, crop_i))
        else:
            found.extend(self.detect_resource(m, i, crop_m, crop_i))
        for violation in found:
            logger.debug(f"{violation.category.value} on {m.id}/{i.id}: {violation.metrics}")
        return found

    def run_detection(
        self, mock: ScreenPair, impl: ScreenPair, timestamp: Optional[datetime] = None
    ) -> "ViolationReport":
        from app.report import MatchStats, ViolationReport, report_timestamp

        mock_leaves = leaf_components(mock.hierarchy)
        impl_leaves = leaf_components(impl.hierarchy)
        result = match_components(mock_leaves, impl_leaves, self.cfg)

        mock_by_id = {c.id: c for c in mock_leaves}
        impl_by_id = {c.id: c for c in impl_leaves}
        violations: List[Violation] = []
        for match in result.matches:
            violations.extend(
                self.detect_pair(
                    mock_by_id[match.mockup_id], impl_by_id[match.impl_id], mock.image, impl.image
                )
            )
        violations.extend(self.detect_presence(result, mock.hierarchy, impl.hierarchy))

        mock_rank = {c.id: n for n, c in enumerate(mock_leaves)}
        impl_rank = {c.id: len(mock_leaves) + n for n, c in enumerate(impl_leaves)}

        def order(v: Violation):
            position = mock_rank[v.mockup_id] if v.mockup_id is not None else impl_rank[v.impl_id]
            return (-v.severity, position, v.category.rank)

        violations.sort(key=order)
        warnings = [f"mockup: {w}" for w in mock.hierarchy.warnings]
        warnings += [f"implementation: {w}" for w in impl.hierarchy.warnings]

        report = ViolationReport(
            timestamp=timestamp or report_timestamp(),
            mockup_source=mock.source,
            impl_source=impl.source,
            config_echo=self.cfg,
            match_stats=MatchStats(
                mockup_leaves=len(mock_leaves),
                impl_leaves=len(impl_leaves),
                matched=len(result.matches),
                unmatched_mockup=len(result.unmatched_mockup),
                unmatched_impl=len(result.unmatched_impl),
            ),
            matches=result.matches,
            violations=tuple(violations),
            warnings=tuple(warnings),
        )
        logger.info(
            f"Compared {len(mock_leaves)} mock-up and {len(impl_leaves)} implementation leaves: "
            f"{len(result.matches)} matched, {len(violations)} violation(s)"
        )
        return report


def _presence_evidence(
    component_id: str,
    own: Optional[ScreenHierarchy],
    other: Optional[ScreenHierarchy],
    own_side: str,
) -> Evidence:
    if own is None:
        return Evidence()
    component = own.find(component_id)
    if component is None:
        return Evidence()
    region = component.bounds
    mirrored = None
    if other is not None:
        mirrored = clamp_bounds(region.x, region.y, region.w, region.h, other.screen_w, other.screen_h)
    if own_side == "mockup":
        return Evidence(mockup_region=region, impl_region=mirrored)
    return Evidence(mockup_region=mirrored, impl_region=region)


def run_detection(
    mock: ScreenPair,
    impl: ScreenPair,
    cfg: Optional[Config] = None,
    timestamp: Optional[datetime] = None,
) -> "ViolationReport":
    """Compare a mock-up screen against its implementation."""
    return ViolationDetector(cfg).run_detection(mock, impl, timestamp=timestamp)
