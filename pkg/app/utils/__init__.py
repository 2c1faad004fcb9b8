"""Configuration and shared helpers for GUI Verify."""

from app.utils.config import Config, Settings, load_config

__all__ = ["Config", "Settings", "load_config"]
