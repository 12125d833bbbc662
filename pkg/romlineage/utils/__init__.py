"""Utility helpers: configuration files, logging setup, address parsing."""

from .config import AnalysisSettings, RomlineageConfig
