"""Utility modules: configuration, logging, errors and numerical kernels."""

from .config import settings
from .logging import ContextLogger, get_logger, setup_logging

__all__ = ["ContextLogger", "get_logger", "settings", "setup_logging"]
