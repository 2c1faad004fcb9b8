from datetime import datetime, timezone

import numpy as np
import pytest
from pydantic import ValidationError

from app.injector import InjectionSpec, inject
from app.matching import MatchResult
from app.model import BoundingBox, ComponentType, ScreenImage, ScreenPair
from app.percept import rgb_delta_e
from app.utils.config import Config
from app.utils.render import render_text_block
from app.violations import (
    CATEGORY_ORDER,
    ViolationCategory,
    ViolationDetector,
    ViolationFamily,
    Violation,
    run_detection,
)
from tests.screens import leaf, random_screen, screen, solid

FIXED_TIME = datetime(2024, 6, 11, 12, 0, tzinfo=timezone.utc)


@pytest.fixture
def detector() -> ViolationDetector:
    return ViolationDetector()


def text_crop(text: str, width: int = 120, height: int = 32) -> ScreenImage:
    pixels = np.full((height, width, 3), 255, dtype=np.uint8)
    bounds = BoundingBox.of(0, 0, width, height)
    render_text_block(pixels, bounds, text, (17, 24, 39), (255, 255, 255))
    return ScreenImage.from_array(pixels)


# ---------------------------------------------------------------------------
# taxonomy
# ---------------------------------------------------------------------------


def test_nine_categories_in_three_families():
    assert len(CATEGORY_ORDER) == 9
    families = {c: c.family for c in CATEGORY_ORDER}
    assert families[ViolationCategory.LAYOUT_RESIZE] is ViolationFamily.LAYOUT
    assert families[ViolationCategory.TEXT_SIZE] is ViolationFamily.TEXT
    assert families[ViolationCategory.RESOURCE_IMAGE] is ViolationFamily.RESOURCE
    assert [c.rank for c in CATEGORY_ORDER] == list(range(9))


@pytest.mark.parametrize(
    "category,mockup_id,impl_id",
    [
        (ViolationCategory.RESOURCE_MISSING, "m", "i"),
        (ViolationCategory.RESOURCE_MISSING, None, None),
        (ViolationCategory.RESOURCE_EXTRA, "m", "i"),
        (ViolationCategory.LAYOUT_TRANSLATION, "m", None),
        (ViolationCategory.TEXT_COLOR, None, "i"),
    ],
)
def test_component_ids_must_fit_the_category(category, mockup_id, impl_id):
    with pytest.raises(ValidationError):
        Violation(category=category, mockup_id=mockup_id, impl_id=impl_id, severity=1.0)


def test_severity_outside_unit_interval_is_rejected():
    with pytest.raises(ValidationError):
        Violation(category=ViolationCategory.RESOURCE_MISSING, mockup_id="m", severity=1.5)


# ---------------------------------------------------------------------------
# layout
# ---------------------------------------------------------------------------


def test_translation_example(detector):
    m = leaf("m", ComponentType.IMAGE, 100, 200, 300, 80)
    i = leaf("i", ComponentType.IMAGE, 112, 200, 300, 80)
    [violation] = detector.detect_layout(m, i)
    assert violation.category is ViolationCategory.LAYOUT_TRANSLATION
    assert violation.metrics == {"dx": 12, "dy": 0}
    assert violation.severity == pytest.approx(0.14)


def test_identical_bounds_have_no_layout_violation(detector):
    m = leaf("m", ComponentType.IMAGE, 100, 200, 300, 80)
    assert detector.detect_layout(m, m) == []


def test_shrink_within_position_tolerance_is_a_resize_only(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 300, 80)
    i = leaf("i", ComponentType.IMAGE, 3, 0, 280, 80)
    [violation] = detector.detect_layout(m, i)
    assert violation.category is ViolationCategory.LAYOUT_RESIZE
    assert violation.metrics == {"dh": 0, "dw": -20}
    assert violation.severity == pytest.approx(0.3)


def test_layout_severity_is_capped(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 10, 10)
    i = leaf("i", ComponentType.IMAGE, 500, 0, 10, 10)
    [violation] = detector.detect_layout(m, i)
    assert violation.severity == 1.0


def test_shift_exactly_at_tolerance_is_accepted(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 10, 10)
    i = leaf("i", ComponentType.IMAGE, 5, 5, 15, 15)
    assert detector.detect_layout(m, i) == []


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------


def test_text_content_example(detector):
    crop = text_crop("Login")
    m = leaf("m", ComponentType.BUTTON, 0, 0, 120, 32, "Login")
    i = leaf("i", ComponentType.BUTTON, 0, 0, 120, 32, "Log in")
    [violation] = detector.detect_text(m, i, crop, crop)
    assert violation.category is ViolationCategory.TEXT_CONTENT
    assert violation.metrics["text_sim"] == pytest.approx(1 - 1 / 6, abs=1e-6)
    assert violation.severity == pytest.approx(1 / 6, abs=1e-6)


def test_identical_text_has_no_violation(detector):
    crop = text_crop("Login")
    m = leaf("m", ComponentType.TEXT, 0, 0, 120, 32, "Login")
    assert detector.detect_text(m, m, crop, crop) == []


def test_text_size_example(detector):
    crop = text_crop("Title")
    m = leaf("m", ComponentType.TEXT, 0, 0, 120, 48, "Title")
    i = leaf("i", ComponentType.TEXT, 0, 0, 120, 56, "Title")
    [violation] = detector.detect_text(m, i, crop, crop)
    assert violation.category is ViolationCategory.TEXT_SIZE
    assert violation.metrics["ratio_deviation"] == pytest.approx(1 / 6, abs=1e-5)
    assert violation.metrics["height_ratio"] == pytest.approx(7 / 6, abs=1e-5)


def test_text_color_uses_the_runner_up_color(detector):
    m = leaf("m", ComponentType.TEXT, 0, 0, 120, 32, "Hello")
    black = text_crop("Hello")
    pixels = black.writable_copy()
    pixels[(pixels != 255).any(axis=2)] = (220, 38, 38)
    red = ScreenImage.from_array(pixels)
    [violation] = detector.detect_text(m, m, black, red)
    assert violation.category is ViolationCategory.TEXT_COLOR
    assert violation.metrics["delta_e"] > 10


# ---------------------------------------------------------------------------
# resource
# ---------------------------------------------------------------------------


def test_identical_resource_has_no_violation(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 10, 10)
    image = solid(10, 10, (40, 90, 200))
    assert detector.detect_resource(m, m, image, image) == []


def test_blue_against_red_is_a_color_violation(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 10, 10)
    [violation] = detector.detect_resource(m, m, solid(10, 10, (0, 0, 255)), solid(10, 10, (255, 0, 0)))
    assert violation.category is ViolationCategory.RESOURCE_COLOR
    expected = rgb_delta_e((8, 8, 248), (248, 8, 8))
    assert violation.metrics["delta_e"] == pytest.approx(expected, rel=1e-5)
    assert violation.severity == 1.0


def test_thirty_percent_repainted_is_an_image_violation(detector):
    m = leaf("m", ComponentType.IMAGE, 0, 0, 10, 10)
    clean = solid(10, 10, (255, 255, 255))
    pixels = clean.writable_copy()
    pixels[:3, :] = (0, 0, 0)
    [violation] = detector.detect_resource(m, m, clean, ScreenImage.from_array(pixels))
    assert violation.category is ViolationCategory.RESOURCE_IMAGE
    assert violation.metrics["differing_fraction"] == pytest.approx(0.3)
    assert violation.metrics["histogram_intersection"] == pytest.approx(0.7)
    assert violation.severity == pytest.approx(0.2)


# ---------------------------------------------------------------------------
# presence
# ---------------------------------------------------------------------------


def test_no_unmatched_leaves_means_no_presence_violation(detector):
    assert detector.detect_presence(MatchResult()) == []


def test_missing_and_extra_in_list_order(detector):
    result = MatchResult(unmatched_mockup=("m7",), unmatched_impl=("i2", "i9"))
    found = detector.detect_presence(result)
    assert [(v.category, v.mockup_id, v.impl_id) for v in found] == [
        (ViolationCategory.RESOURCE_MISSING, "m7", None),
        (ViolationCategory.RESOURCE_EXTRA, None, "i2"),
        (ViolationCategory.RESOURCE_EXTRA, None, "i9"),
    ]
    assert all(v.severity == 1.0 for v in found)


# ---------------------------------------------------------------------------
# run_detection
# ---------------------------------------------------------------------------


def test_fixture_against_itself_is_clean(login_screen):
    report = run_detection(login_screen, login_screen, timestamp=FIXED_TIME)
    assert report.violations == ()
    assert report.match_stats.matched == report.match_stats.mockup_leaves == 15
    assert report.conforms


def test_random_screens_against_themselves_are_clean(rng):
    for _ in range(100):
        pair = random_screen(rng)
        report = run_detection(pair, pair, timestamp=FIXED_TIME)
        assert report.violations == ()


def test_one_leaf_against_an_empty_screen():
    mock = screen(100, 100, [leaf("m1", ComponentType.IMAGE, 10, 10, 20, 20)])
    impl = screen(100, 100, [])
    report = run_detection(mock, impl, timestamp=FIXED_TIME)
    [violation] = report.violations
    assert violation.category is ViolationCategory.RESOURCE_MISSING
    assert violation.mockup_id == "m1"
    assert violation.evidence.mockup_region.as_tuple() == (10, 10, 20, 20)
    assert violation.evidence.impl_region.as_tuple() == (10, 10, 20, 20)


def test_injected_translation_is_the_only_finding(login_screen):
    case = inject(
        login_screen, InjectionSpec(category=ViolationCategory.LAYOUT_TRANSLATION, target_id="logo"), seed=1
    )
    report = run_detection(case.mockup, case.impl, timestamp=FIXED_TIME)
    assert [(v.category, v.mockup_id, v.impl_id) for v in report.violations] == [
        g.key for g in case.ground_truth
    ]


def test_ordering_by_severity_then_position():
    mock = screen(
        400,
        400,
        [
            leaf("a", ComponentType.IMAGE, 0, 0, 20, 20),
            leaf("b", ComponentType.IMAGE, 100, 0, 20, 20),
            leaf("c", ComponentType.IMAGE, 200, 0, 20, 20),
        ],
    )
    impl = screen(
        400,
        400,
        [
            leaf("a", ComponentType.IMAGE, 8, 0, 20, 20),
            leaf("b", ComponentType.IMAGE, 110, 0, 20, 20),
            leaf("x", ComponentType.OTHER, 300, 300, 20, 20),
        ],
    )
    report = run_detection(mock, impl, timestamp=FIXED_TIME)
    assert [(v.category.value, v.mockup_id, v.impl_id) for v in report.violations] == [
        ("RESOURCE_MISSING", "c", None),
        ("RESOURCE_EXTRA", None, "x"),
        ("LAYOUT_TRANSLATION", "b", "b"),
        ("LAYOUT_TRANSLATION", "a", "a"),
    ]


def test_detection_is_deterministic(login_screen):
    case = inject(
        login_screen, InjectionSpec(category=ViolationCategory.RESOURCE_IMAGE, target_id="logo"), seed=3
    )
    first = run_detection(case.mockup, case.impl, timestamp=FIXED_TIME)
    second = run_detection(case.mockup, case.impl, timestamp=FIXED_TIME)
    assert first == second


def test_raising_tolerances_never_adds_violations(rng):
    loose = Config(
        pos_tol=40, size_tol=40, text_color_tol=60, color_tol=60, image_tol=0.9, text_size_tol=1.0
    )
    for _ in range(20):
        mock, impl = random_screen(rng), random_screen(rng)
        strict = run_detection(mock, impl, timestamp=FIXED_TIME)
        relaxed = run_detection(mock, impl, cfg=loose, timestamp=FIXED_TIME)
        assert len(relaxed.violations) <= len(strict.violations)


def test_evidence_stays_on_screen(rng):
    for _ in range(30):
        mock, impl = random_screen(rng), random_screen(rng, 200, 280)
        report = run_detection(mock, impl, timestamp=FIXED_TIME)
        for v in report.violations:
            if v.evidence.mockup_region is not None:
                assert v.evidence.mockup_region.fits(mock.image.width, mock.image.height)
            if v.evidence.impl_region is not None:
                assert v.evidence.impl_region.fits(impl.image.width, impl.image.height)


def test_hierarchy_warnings_are_carried_with_their_side(login_screen):
    warned = login_screen.hierarchy.model_copy(update={"warnings": ("component 'x' clamped",)})
    mock = ScreenPair(hierarchy=warned, image=login_screen.image, origin=login_screen.origin)
    report = run_detection(mock, login_screen, timestamp=FIXED_TIME)
    assert report.warnings == ("mockup: component 'x' clamped",)
