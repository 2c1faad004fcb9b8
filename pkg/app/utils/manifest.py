"""Pair manifests: lists of screen-pair file quadruples consumed by batch runs and self-tests.

A manifest is either a JSON list of records or an object ``{"pairs": [...]}``. Paths in a
record are resolved relative to the manifest's directory.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.errors import IOFailure, MalformedDocument
from app.violations import ViolationCategory

logger = logging.getLogger(__name__)


class GroundTruth(BaseModel):
    """One expected violation, identified by category and the affected component ids."""

    model_config = ConfigDict(frozen=True)

    category: ViolationCategory
    mockup_id: Optional[str] = None
    impl_id: Optional[str] = None

    @property
    def key(self):
        return (self.category, self.mockup_id, self.impl_id)


class PairRecord(BaseModel):
    model_config = ConfigDict(frozen=True, extra="ignore")

    name: str = Field(min_length=1)
    mock_img: str
    mock_meta: str
    impl_img: str
    impl_meta: str
    ground_truth: Optional[List[GroundTruth]] = None

    @field_validator("name")
    @classmethod
    def _safe_name(cls, value: str) -> str:
        if value in (".", "..") or "/" in value or "\\" in value:
            raise ValueError(f"pair name {value!r} must be a single path component")
        return value

    def resolve(self, base: Path) -> "PairRecord":
        """Copy with every path made absolute against ``base``."""
        return self.model_copy(
            update={
                key: str(base / getattr(self, key))
                for key in ("mock_img", "mock_meta", "impl_img", "impl_meta")
            }
        )


def read_manifest(path: Union[str, Path]) -> List[PairRecord]:
    """Parse a manifest; returned records carry resolved paths."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IOFailure(f"cannot read manifest {path}: {e.strerror or e}", path=str(path))
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
    except UnicodeDecodeError as e:
        raise MalformedDocument(f"{path}: not valid UTF-8 ({e.reason})")

    if isinstance(raw, dict):
        raw = raw.get("pairs")
    if not isinstance(raw, list):
        raise MalformedDocument(f"{path}: manifest must be a list of pair records")

    records = []
    for n, entry in enumerate(raw):
        try:
            records.append(PairRecord.model_validate(entry).resolve(path.parent))
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or "<record>"
            raise MalformedDocument(f"{path}: pair {n}: {field}: {first['msg']}")

    names = [r.name for r in records]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise MalformedDocument(f"{path}: duplicate pair names {duplicates}")
    logger.debug(f"Read {len(records)} pair record(s) from {path}")
    return records


def write_manifest(records: Sequence[PairRecord], path: Union[str, Path]) -> Path:
    path = Path(path)
    document = {"pairs": [r.model_dump(mode="json", exclude_none=True) for r in records]}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot write manifest {path}: {e.strerror or e}", path=str(path))
    return path
