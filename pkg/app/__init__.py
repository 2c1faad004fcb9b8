"""GUI Verify: detect design violations between a mock-up screen and its implementation."""

__version__ = "1.0.0"

__all__ = ["__version__"]
