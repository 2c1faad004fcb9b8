"""Configuration management for GUI Verify.

Two layers:

* ``Config`` holds the detection parameters. It is loaded from a JSON document and
  echoed verbatim into every report, so a report can be reproduced from its inputs.
* ``Settings`` holds process-level settings read from environment variables (or a
  ``.env`` file), including the config-path fallback ``GUI_VERIFY_CONFIG``.
"""
import json
import logging
import math
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.errors import ConfigError

logger = logging.getLogger(__name__)


class MatchWeights(BaseModel):
    """Weights of the three similarity terms used for component matching."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    spatial: float = Field(0.5, ge=0.0)
    ctype: float = Field(0.3, ge=0.0)
    text: float = Field(0.2, ge=0.0)

    @model_validator(mode="after")
    def _weights_sum_to_one(self) -> "MatchWeights":
        total = self.spatial + self.ctype + self.text
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"match weights must sum to 1, got {total}")
        return self


class SeverityScales(BaseModel):
    """Excess over tolerance at which a violation's severity saturates at 1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    layout_px: float = Field(50.0, gt=0.0)
    color_delta_e: float = Field(50.0, gt=0.0)
    text_size_ratio: float = Field(0.5, gt=0.0)
    image_fraction: float = Field(0.5, gt=0.0)


class Config(BaseModel):
    """Detection parameters. All tolerances are inclusive: a violation needs to exceed them."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    weights: MatchWeights = Field(default_factory=MatchWeights)
    match_threshold: float = Field(0.4, ge=0.0, le=1.0)
    match_by_id: bool = False
    match_strategy: Literal["greedy", "optimal"] = "greedy"

    pos_tol: float = Field(5.0, ge=0.0)
    size_tol: float = Field(5.0, ge=0.0)
    text_color_tol: float = Field(10.0, ge=0.0)
    color_tol: float = Field(10.0, ge=0.0)
    image_tol: float = Field(0.2, ge=0.0)
    text_size_tol: float = Field(0.1, ge=0.0)
    jnd: float = Field(2.3, ge=0.0)
    delta_e_formula: Literal["cie76", "ciede2000"] = "cie76"

    severity: SeverityScales = Field(default_factory=SeverityScales)
    injection_margin: float = Field(2.0, ge=1.0)


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="GUI_VERIFY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Config document used when no --config flag is given
    config_path: Optional[Path] = Field(None, validation_alias=AliasChoices("GUI_VERIFY_CONFIG"))

    log_level: str = "INFO"

    # Default batch parallelism
    jobs: int = Field(4, ge=1)

    # Pins report timestamps (reproducible-builds convention)
    source_date_epoch: Optional[int] = Field(
        None, validation_alias=AliasChoices("SOURCE_DATE_EPOCH", "GUI_VERIFY_SOURCE_DATE_EPOCH")
    )


def _format_validation_error(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: Union[bytes, str], source: str = "<config>") -> Config:
    """Parse and validate a JSON config document."""
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}", source=source)
    except UnicodeDecodeError as e:
        raise ConfigError(f"{source}: not valid UTF-8 ({e.reason})", source=source)
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: config document must be a JSON object", source=source)
    try:
        return Config.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{source}: {_format_validation_error(e)}", source=source)


def load_config(path: Optional[Union[str, Path]] = None, env: Optional[Settings] = None) -> Config:
    """Load the effective config.

    Resolution order: explicit ``path``, then ``GUI_VERIFY_CONFIG``, then defaults.
    """
    if path is None:
        env = env or Settings()
        path = env.config_path
    if path is None:
        logger.debug("No config document given, using defaults")
        return Config()

    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}", source=str(path))
    config = parse_config(data, source=str(path))
    logger.info(f"Loaded config from {path}")
    return config

