"""Reading romlineage INI configuration files."""
import configparser
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Union

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "ROMLINEAGE_CONFIG"


@dataclass(frozen=True)
class AnalysisSettings:
    """Effective analysis parameters after CLI flags, INI files and defaults are merged."""
    t_derived: int = 4
    t_original: int = 1
    k: int = 16
    winnow: Optional[int] = None
    mask_operands: bool = False
    db_path: Optional[str] = None
    processes: int = 1


class RomlineageConfig:
    """
    Reads analysis defaults from one or more INI files.

    Sections: [lineage] t_derived, t_original; [similarity] k, winnow, mask_operands;
    [scan] db; [batch] processes. Later files override earlier ones.
    """

    def __init__(self) -> None:
        self._ini_files: List[Path] = []
        self._parser = configparser.ConfigParser()

    def set_ini_files(self, *file_paths: Union[str, Path]) -> None:
        """
        Sets the INI files to read. Missing files are skipped with a warning.

        Args:
            *file_paths (Union[str, Path]): One or more paths to INI files.
        """
        self._ini_files = []
        self._parser = configparser.ConfigParser()
        for file_path in file_paths:
            path = Path(file_path)
            if path.exists() and path.is_file():
                self._ini_files.append(path.resolve())
            else:
                log.warning(f"Config file not found or is not a file: {path}")
        for path in self._ini_files:
            try:
                self._parser.read(path, encoding="utf-8")
            except configparser.Error as e:
                log.warning(f"Could not parse {path}: {e}")

    @classmethod
    def from_environment(cls, *extra_paths: Union[str, Path]) -> "RomlineageConfig":
        """Config from $ROMLINEAGE_CONFIG (os.pathsep-separated) followed by extra_paths."""
        config = cls()
        env_value = os.environ.get(CONFIG_ENV_VAR, "")
        paths = [p for p in env_value.split(os.pathsep) if p] + list(extra_paths)
        config.set_ini_files(*paths)
        return config

    @property
    def ini_files(self) -> List[Path]:
        return list(self._ini_files)

    def _get(self, section: str, key: str, kind: type):
        if not self._parser.has_option(section, key):
            return None
        try:
            if kind is bool:
                return self._parser.getboolean(section, key)
            if kind is int:
                return self._parser.getint(section, key)
            return self._parser.get(section, key).strip() or None
        except ValueError as e:
            log.warning(f"Ignoring [{section}] {key}: {e}")
            return None

    def settings(self, **overrides) -> AnalysisSettings:
        """
        Merges INI values over the defaults, then non-None overrides over both.

        Args:
            **overrides: AnalysisSettings field values from the command line
        """
        values = {
            "t_derived": self._get("lineage", "t_derived", int),
            "t_original": self._get("lineage", "t_original", int),
            "k": self._get("similarity", "k", int),
            "winnow": self._get("similarity", "winnow", int),
            "mask_operands": self._get("similarity", "mask_operands", bool),
            "db_path": self._get("scan", "db", str),
            "processes": self._get("batch", "processes", int),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return replace(AnalysisSettings(), **{key: value for key, value in values.items() if value is not None})
