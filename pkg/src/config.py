"""
Configuration Management - Load search bounds and output preferences
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from decorators import PathManager

logger = logging.getLogger(__name__)

c_MAX_ITER_ENV = "CHATELET_MAX_ITER"
c_CONFIG_ENV = "CHATELET_CONFIG"

# Default configuration
c_DEFAULT_CONFIG: Dict[str, Any] = {
    "solver": {"max_iterations": 1_000_000, "interval_periods": 64},
    "fields": {"prime_bound": 1_000_000, "nonsquare_search_count": 200},
    "search": {"unit_bound": 50, "extra_depth": 2},
    "certificate": {"sample_prime_bound": 100},
    "output": {"color": "auto"},
}


class Config:
    """Manages solver bounds and output preferences"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration

        Args:
            config_path: Optional custom config file path; falls back to
                $CHATELET_CONFIG, then ~/.chatelet/config.json
        """
        if config_path:
            self.config_path = Path(config_path)
        elif os.environ.get(c_CONFIG_ENV):
            self.config_path = Path(os.environ[c_CONFIG_ENV])
        else:
            self.config_path = PathManager.get_config_file()
        self.warnings: list = []
        self.settings = self._load_config()
        self._apply_env_overrides()

    def _load_config(self) -> Dict[str, Any]:
        """
        Load configuration from file, merged over the defaults

        Returns:
            Configuration dictionary
        """
        defaults = copy.deepcopy(c_DEFAULT_CONFIG)
        if not self.config_path.exists():
            return defaults

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                user = json.load(f)
            if not isinstance(user, dict):
                raise ValueError("top level must be an object")
            return self._merge_configs(defaults, user)
        except (json.JSONDecodeError, IOError, ValueError) as e:
            self.warnings.append(f"Could not load config file ({e}). Using defaults.")
            logger.debug("config load failed for %s: %s", self.config_path, e)
            return defaults

    def _merge_configs(self, default: Dict, user: Dict) -> Dict:
        """
        Recursively merge user config with defaults

        Args:
            default: Default configuration
            user: User configuration

        Returns:
            Merged configuration
        """
        result = default.copy()

        for key, value in user.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def _apply_env_overrides(self) -> None:
        raw = os.environ.get(c_MAX_ITER_ENV)
        if raw is None:
            return
        try:
            value = int(raw)
            if value < 1:
                raise ValueError(raw)
        except ValueError:
            self.warnings.append(f"Ignoring {c_MAX_ITER_ENV}={raw!r}: expected a positive integer")
            return
        self.set("solver.max_iterations", value)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation

        Args:
            key: Configuration key (e.g., "solver.max_iterations")
            default: Default value if key not found

        Returns:
            Configuration value
        """
        keys = key.split(".")
        value = self.settings

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def set(self, key: str, value: Any) -> None:
        """
        Set configuration value using dot notation

        Args:
            key: Configuration key (e.g., "search.unit_bound")
            value: Value to set
        """
        keys = key.split(".")
        target = self.settings

        for k in keys[:-1]:
            if k not in target:
                target[k] = {}
            target = target[k]

        target[keys[-1]] = value

    def save(self) -> None:
        """Save current configuration to file"""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, "w", encoding="utf-8") as f:
            json.dump(self.settings, f, indent=2)

    def max_iterations(self) -> int:
        return int(self.get("solver.max_iterations", 1_000_000))

    def interval_periods(self) -> int:
        return int(self.get("solver.interval_periods", 64))

    def prime_bound(self) -> int:
        return int(self.get("fields.prime_bound", 1_000_000))

    def nonsquare_search_count(self) -> int:
        return int(self.get("fields.nonsquare_search_count", 200))

    def unit_bound(self) -> int:
        return int(self.get("search.unit_bound", 50))

    def extra_depth(self) -> int:
        return int(self.get("search.extra_depth", 2))

    def sample_prime_bound(self) -> int:
        return int(self.get("certificate.sample_prime_bound", 100))

    def color_mode(self) -> str:
        return str(self.get("output.color", "auto"))

    def builder_options(self) -> Dict[str, int]:
        """Keyword arguments shared by the parameter builders"""
        return {
            "max_iterations": self.max_iterations(),
            "prime_bound": self.prime_bound(),
            "interval_periods": self.interval_periods(),
        }

    def search_options(self) -> Dict[str, int]:
        """Keyword arguments for the local invariant search"""
        return {"unit_bound": self.unit_bound(), "extra_depth": self.extra_depth()}
