"""
Run-time configuration: numeric tolerances and truncations, periodicity
search bounds, enumeration limits and output defaults.
"""

import configparser
import os
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

try:
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover
    load_dotenv = None

try:
    from ..utils.error_handling import ErrorHandler
except ImportError:
    from primcalc.utils.error_handling import ErrorHandler


CONFIG_ENV = "PRIMCALC_CONFIG"
OUTPUT_DIR_ENV = "PRIMCALC_OUTPUT_DIR"
OUTPUT_FORMATS = ('json', 'dot', 'text')

# section -> key -> (default, type)
SCHEMA: Dict[str, Dict[str, tuple]] = {
    'Numerics': {
        'fft_grid': ('4096', int),
        'truncation': ('4', int),
        'zero_tolerance': ('1e-6', float),
        'arith_tolerance': ('1e-8', float),
        'bump_support': ('32', int),
    },
    'Periodicity': {
        'bound': ('4', int),
        'depth': ('3', int),
        'window_margin': ('1', int),
    },
    'Enumeration': {
        'max_tail_vertices': ('15', int),
        'max_path_length': ('8', int),
    },
    'Output': {
        'format': ('text', str),
        'output_directory': ('primcalc-out', str),
        'log_level': ('warning', str),
    },
}


def default_config_path() -> str:
    return os.environ.get(CONFIG_ENV) or str(Path.home() / ".primcalc" / "config.cfg")


class PrimcalcSettings:
    """configparser-backed settings, seeded from SCHEMA and overlaid by the config file."""

    def __init__(self, config_path: Optional[str] = None):
        if load_dotenv:
            load_dotenv()
        self.config_path = str(config_path or default_config_path())
        self.defaults = {
            section: {key: default for key, (default, _) in keys.items()}
            for section, keys in SCHEMA.items()
        }
        self.config = configparser.ConfigParser()
        self.load_settings()

    def load_settings(self):
        self.reset_to_defaults()
        if not os.path.exists(self.config_path):
            return
        try:
            self.config.read(self.config_path, encoding='utf-8')
        except configparser.Error as e:
            ErrorHandler.log_warning(f"ignoring unreadable config {self.config_path}: {e}")

    def save_settings(self) -> bool:
        return self.export_settings(self.config_path)

    # access

    def get(self, section: str, key: str, fallback: Any = None) -> str:
        return self.config.get(section, key, fallback=fallback)

    def _typed(self, read: Callable, section: str, key: str, fallback):
        try:
            return read(section, key, fallback=fallback)
        except ValueError:
            ErrorHandler.log_warning(f"[{section}] {key} = {self.get(section, key)!r} is malformed")
            return fallback

    def get_bool(self, section: str, key: str, fallback: bool = False) -> bool:
        return self._typed(self.config.getboolean, section, key, fallback)

    def get_int(self, section: str, key: str, fallback: int = 0) -> int:
        return self._typed(self.config.getint, section, key, fallback)

    def get_float(self, section: str, key: str, fallback: float = 0.0) -> float:
        return self._typed(self.config.getfloat, section, key, fallback)

    def set(self, section: str, key: str, value: Any):
        self.set_section(section, {key: value})

    def get_section(self, section: str) -> Dict[str, str]:
        if not self.config.has_section(section):
            return {}
        return dict(self.config.items(section))

    def set_section(self, section: str, settings: Dict[str, Any]):
        if not self.config.has_section(section):
            self.config.add_section(section)
        for key, value in settings.items():
            self.config.set(section, key, str(value))

    def reset_to_defaults(self, section: Optional[str] = None):
        """Restore one section, or drop every override when ``section`` is None."""
        if section is not None:
            if section in self.defaults:
                self.set_section(section, self.defaults[section])
            return
        for name in self.config.sections():
            self.config.remove_section(name)
        for name, options in self.defaults.items():
            self.set_section(name, options)

    # files

    def export_settings(self, file_path: str) -> bool:
        try:
            Path(file_path).parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, 'w', encoding='utf-8') as f:
                self.config.write(f)
        except OSError as e:
            ErrorHandler.log_error(f"cannot write settings to {file_path}", e)
            return False
        return True

    def import_settings(self, file_path: str) -> bool:
        """Overlay the sections of another config file."""
        incoming = configparser.ConfigParser()
        try:
            if not incoming.read(file_path, encoding='utf-8'):
                raise OSError(f"{file_path} is not readable")
        except (OSError, configparser.Error) as e:
            ErrorHandler.log_error(f"cannot import settings from {file_path}", e)
            return False
        for section in incoming.sections():
            self.set_section(section, dict(incoming.items(section)))
        return True

    # grouped views

    def _group(self, section: str) -> Dict[str, Any]:
        readers = {int: self.get_int, float: self.get_float, str: self.get}
        return {
            key: readers[kind](section, key, kind(default))
            for key, (default, kind) in SCHEMA[section].items()
        }

    def get_numeric_settings(self) -> Dict[str, Any]:
        return self._group('Numerics')

    def get_periodicity_settings(self) -> Dict[str, Any]:
        return self._group('Periodicity')

    def get_enumeration_settings(self) -> Dict[str, Any]:
        return self._group('Enumeration')

    def get_output_directory(self) -> str:
        """PRIMCALC_OUTPUT_DIR wins over [Output] output_directory."""
        out = os.environ.get(OUTPUT_DIR_ENV) or self.get('Output', 'output_directory')
        return os.path.expanduser(out)

    def validate_settings(self) -> List[str]:
        issues = []
        numerics = self.get_numeric_settings()
        grid = numerics['fft_grid']
        if grid < 64 or grid & (grid - 1):
            issues.append(f"fft_grid should be a power of two >= 64: {grid}")
        if numerics['truncation'] < 1:
            issues.append("truncation must be at least 1")
        zero_tol, arith_tol = numerics['zero_tolerance'], numerics['arith_tolerance']
        if not 0 < arith_tol < zero_tol < 1:
            issues.append(
                f"tolerances must satisfy 0 < arith_tolerance < zero_tolerance < 1: "
                f"{arith_tol}, {zero_tol}"
            )
        for key, value in self.get_periodicity_settings().items():
            if key != 'window_margin' and value < 1:
                issues.append(f"Periodicity {key} must be at least 1")
        if self.get('Output', 'format') not in OUTPUT_FORMATS:
            issues.append(f"unknown output format: {self.get('Output', 'format')}")
        return issues


_settings_instance = None


def get_settings() -> PrimcalcSettings:
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = PrimcalcSettings()
    return _settings_instance
