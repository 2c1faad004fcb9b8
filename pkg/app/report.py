"""Comparison reports: canonical JSON documents, annotated screenshots and a static HTML bundle."""
import html
import json
import logging
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, field_validator

from app import __version__
from app.errors import IOFailure, MalformedDocument, UnknownCategory, VersionMismatch
from app.matching import ComponentMatch
from app.model import Origin, ScreenImage, crop
from app.utils.config import Config, Settings
from app.utils.numeric import round_sig
from app.violations import Violation, ViolationCategory, ViolationFamily

logger = logging.getLogger(__name__)

STROKE_WIDTH = 3

FAMILY_COLORS: Dict[ViolationFamily, Tuple[int, int, int]] = {
    ViolationFamily.LAYOUT: (220, 38, 38),
    ViolationFamily.TEXT: (234, 88, 12),
    ViolationFamily.RESOURCE: (124, 58, 237),
}


class MatchStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    mockup_leaves: int = Field(0, ge=0)
    impl_leaves: int = Field(0, ge=0)
    matched: int = Field(0, ge=0)
    unmatched_mockup: int = Field(0, ge=0)
    unmatched_impl: int = Field(0, ge=0)


class ViolationReport(BaseModel):
    """Outcome of one mock-up vs implementation comparison.

    Field order is the key order of the serialized document.
    """

    model_config = ConfigDict(frozen=True)

    tool_version: str = __version__
    timestamp: datetime
    mockup_source: str = ""
    impl_source: str = ""
    config_echo: Config = Field(default_factory=Config)
    match_stats: MatchStats = Field(default_factory=MatchStats)
    matches: Tuple[ComponentMatch, ...] = ()
    violations: Tuple[Violation, ...] = ()
    warnings: Tuple[str, ...] = ()

    @field_validator("timestamp")
    @classmethod
    def _as_utc(cls, value: datetime) -> datetime:
        if value.tzinfo is None:
            return value.replace(tzinfo=timezone.utc)
        return value.astimezone(timezone.utc)

    @field_serializer("timestamp")
    def _serialize_timestamp(self, value: datetime) -> str:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%fZ")

    @property
    def conforms(self) -> bool:
        return not self.violations

    def summary_by_category(self) -> Dict[str, int]:
        """Violation count per category, in taxonomy order, zero counts omitted."""
        counts = Counter(v.category for v in self.violations)
        return {category.value: counts[category] for category in ViolationCategory if counts[category]}


def report_timestamp(env: Optional[Settings] = None) -> datetime:
    """Current UTC time, or the instant pinned by ``SOURCE_DATE_EPOCH``."""
    env = env or Settings()
    if env.source_date_epoch is not None:
        return datetime.fromtimestamp(env.source_date_epoch, tz=timezone.utc)
    return datetime.now(timezone.utc)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _canonical(value: Any) -> Any:
    if isinstance(value, float):
        return round_sig(value)
    if isinstance(value, dict):
        return {key: _canonical(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_canonical(item) for item in value]
    return value


def to_json(report: ViolationReport) -> bytes:
    """Canonical document: model field order, sorted metric names, 6 significant digits."""
    document = _canonical(report.model_dump(mode="json"))
    return (json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n").encode("utf-8")


def _major(version: str) -> str:
    return version.split(".", 1)[0]


def from_json(data: Union[bytes, str]) -> ViolationReport:
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"report line {e.lineno} column {e.colno}: {e.msg}")
    except UnicodeDecodeError as e:
        raise MalformedDocument(f"report is not valid UTF-8 ({e.reason})")
    if not isinstance(raw, dict):
        raise MalformedDocument("report document must be a JSON object")

    version = raw.get("tool_version")
    if not isinstance(version, str):
        raise MalformedDocument("report has no tool_version")
    if _major(version) != _major(__version__):
        raise VersionMismatch(
            f"report written by version {version}, this is {__version__}",
            found=version,
            expected=__version__,
        )

    known = {category.value for category in ViolationCategory}
    violations = raw.get("violations", [])
    if isinstance(violations, list):
        for entry in violations:
            if isinstance(entry, dict) and isinstance(entry.get("category"), str):
                if entry["category"] not in known:
                    raise UnknownCategory(
                        f"unknown violation category {entry['category']!r}", category=entry["category"]
                    )

    try:
        return ViolationReport.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise MalformedDocument(f"{field}: {first['msg']}")


def read_report(path: Union[str, Path]) -> ViolationReport:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IOFailure(f"cannot read report {path}: {e.strerror or e}", path=str(path))
    return from_json(data)


def write_report(report: ViolationReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(to_json(report))
    except OSError as e:
        raise IOFailure(f"cannot write report {path}: {e.strerror or e}", path=str(path))
    return path


# ---------------------------------------------------------------------------
# Images
# ---------------------------------------------------------------------------


def annotate_image(
    image: ScreenImage, violations: Sequence[Violation], origin: Origin = Origin.MOCKUP
) -> ScreenImage:
    """Copy of ``image`` with a 3-px frame drawn inside each violation's region.

    Frames are stroked in list order, so later ones overwrite earlier ones.
    """
    canvas = image.writable_copy()
    for violation in violations:
        evidence = violation.evidence
        region = evidence.mockup_region if origin is Origin.MOCKUP else evidence.impl_region
        if region is None:
            continue
        color = FAMILY_COLORS[violation.category.family]
        x0, y0, x1, y1 = region.x, region.y, region.right, region.bottom
        # bands are clipped to the box, so boxes thinner than two strokes fill solid
        canvas[y0 : min(y0 + STROKE_WIDTH, y1), x0:x1] = color
        canvas[max(y1 - STROKE_WIDTH, y0) : y1, x0:x1] = color
        canvas[y0:y1, x0 : min(x0 + STROKE_WIDTH, x1)] = color
        canvas[y0:y1, max(x1 - STROKE_WIDTH, x0) : x1] = color
    return ScreenImage.from_array(canvas)


# ---------------------------------------------------------------------------
# HTML
# ---------------------------------------------------------------------------

_PAGE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>GUI Verify report</title>
</head>
<body style="font-family: sans-serif; margin: 24px; color: #111827;">
<h1 style="margin-bottom: 4px;">GUI Verify report</h1>
<p style="color: #6b7280; margin-top: 0;">{meta}</p>
{banner}
{legend}
{stats}
<div style="display: flex; gap: 24px; margin: 16px 0;">
<figure style="margin: 0;"><img src="annotated_mockup.png" alt="annotated mock-up" style="max-width: 360px; border: 1px solid #d1d5db;"><figcaption>Mock-up</figcaption></figure>
<figure style="margin: 0;"><img src="annotated_impl.png" alt="annotated implementation" style="max-width: 360px; border: 1px solid #d1d5db;"><figcaption>Implementation</figcaption></figure>
</div>
{violations}
{warnings}
</body>
</html>
"""


def _hex(color: Tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*color)


def _banner(report: ViolationReport) -> str:
    if report.conforms:
        return (
            '<div style="padding: 12px; background: #dcfce7; border: 1px solid #16a34a;">'
            "The implementation conforms to the mock-up: no design violations found.</div>"
        )
    counts = ", ".join(f"{html.escape(name)}: {n}" for name, n in report.summary_by_category().items())
    return (
        '<div style="padding: 12px; background: #fee2e2; border: 1px solid #dc2626;">'
        f"{len(report.violations)} design violation(s) found ({counts}).</div>"
    )


def _legend() -> str:
    items = "".join(
        f'<li><span style="display: inline-block; width: 12px; height: 12px; '
        f'border: 3px solid {_hex(color)}; margin-right: 6px;"></span>{family.value}</li>'
        for family, color in FAMILY_COLORS.items()
    )
    return f'<ul style="list-style: none; padding: 0; display: flex; gap: 16px;">{items}</ul>'


def _stats(report: ViolationReport) -> str:
    s = report.match_stats
    return (
        f"<p>Leaves: {s.mockup_leaves} mock-up, {s.impl_leaves} implementation. "
        f"Matched {s.matched}; unmatched {s.unmatched_mockup} mock-up, {s.unmatched_impl} implementation.</p>"
    )


def _evidence_cell(path: Optional[str], label: str) -> str:
    if path is None:
        return f'<td style="color: #9ca3af;">no {label} region</td>'
    return f'<td><img src="{html.escape(path)}" alt="{label} evidence" style="max-width: 240px;"></td>'


def _violation_rows(report: ViolationReport, evidence: List[Tuple[Optional[str], Optional[str]]]) -> str:
    if report.conforms:
        return ""
    rows = []
    for index, (violation, (mock_path, impl_path)) in enumerate(zip(report.violations, evidence)):
        color = _hex(FAMILY_COLORS[violation.category.family])
        metrics = "<br>".join(
            f"{html.escape(name)} = {value:g}" for name, value in violation.metrics.items()
        )
        rows.append(
            "<tr>"
            f"<td>{index}</td>"
            f'<td style="color: {color}; font-weight: bold;">{violation.category.value}</td>'
            f"<td>{violation.severity:g}</td>"
            f"<td>{html.escape(violation.mockup_id or '-')}</td>"
            f"<td>{html.escape(violation.impl_id or '-')}</td>"
            f"<td>{metrics or '-'}</td>"
            f"{_evidence_cell(mock_path, 'mock-up')}"
            f"{_evidence_cell(impl_path, 'implementation')}"
            "</tr>"
        )
    header = (
        "<tr><th>#</th><th>Category</th><th>Severity</th><th>Mock-up id</th>"
        "<th>Implementation id</th><th>Metrics</th><th>Mock-up</th><th>Implementation</th></tr>"
    )
    return (
        '<table style="border-collapse: collapse;" border="1" cellpadding="6">'
        f"{header}{''.join(rows)}</table>"
    )


def _warnings(report: ViolationReport) -> str:
    if not report.warnings:
        return ""
    items = "".join(f"<li>{html.escape(w)}</li>" for w in report.warnings)
    return f"<h2>Warnings</h2><ul>{items}</ul>"


def render_html(
    report: ViolationReport,
    mock_image: ScreenImage,
    impl_image: ScreenImage,
    outdir: Union[str, Path],
) -> List[Path]:
    """Write the static HTML bundle into ``outdir`` and return the written paths.

    Layout: ``index.html``, ``annotated_mockup.png``, ``annotated_impl.png`` and
    ``evidence/<index>_mock.png`` / ``evidence/<index>_impl.png`` per violation.
    """
    outdir = Path(outdir)
    index_path = outdir / "index.html"
    written: List[Path] = []
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        written.append(
            annotate_image(mock_image, report.violations, Origin.MOCKUP).save_png(
                outdir / "annotated_mockup.png"
            )
        )
        written.append(
            annotate_image(impl_image, report.violations, Origin.IMPLEMENTATION).save_png(
                outdir / "annotated_impl.png"
            )
        )

        evidence: List[Tuple[Optional[str], Optional[str]]] = []
        if report.violations:
            (outdir / "evidence").mkdir(exist_ok=True)
        for index, violation in enumerate(report.violations):
            paths: List[Optional[str]] = []
            for region, image, suffix in (
                (violation.evidence.mockup_region, mock_image, "mock"),
                (violation.evidence.impl_region, impl_image, "impl"),
            ):
                if region is None:
                    paths.append(None)
                    continue
                relative = f"evidence/{index}_{suffix}.png"
                written.append(crop(image, region).save_png(outdir / relative))
                paths.append(relative)
            evidence.append((paths[0], paths[1]))

        meta = html.escape(
            f"version {report.tool_version} | "
            f"{report.timestamp.isoformat()} | "
            f"mock-up {report.mockup_source or '-'} | implementation {report.impl_source or '-'}"
        )
        page = _PAGE.format(
            meta=meta,
            banner=_banner(report),
            legend=_legend(),
            stats=_stats(report),
            violations=_violation_rows(report, evidence),
            warnings=_warnings(report),
        )
        index_path.write_text(page, encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot write HTML report to {outdir}: {e.strerror or e}", path=str(outdir))

    logger.info(f"Wrote HTML report with {len(written) + 1} file(s) to {outdir}")
    return [index_path] + written
