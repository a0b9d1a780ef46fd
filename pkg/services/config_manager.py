"""
Config Manager
Loads run defaults and named scenarios from the JSON configuration file and
resolves user documents and flag overrides into a validated RunConfig
"""
import copy
import json
import logging
import os
from typing import Any, Dict, Optional

from pydantic import ValidationError

from models.errors import ConfigError
from models.schemas import RunConfig

logger = logging.getLogger(__name__)


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base; lists and scalars are replaced"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigManager:
    """
    Manages run defaults loaded from an external configuration file
    Defaults can be changed without touching code
    """

    DEFAULT_CONFIG_PATH = "config/defaults.json"

    def __init__(self, config_path: str = None):
        """
        Initialize config manager

        Args:
            config_path: Path of the defaults file, relative to the repository root
        """
        self.config_path = config_path or self.DEFAULT_CONFIG_PATH
        self.defaults = self._load_defaults()
        logger.info(f"Config manager initialized with {len(self.scenarios())} scenario(s)")

    def _load_defaults(self) -> Dict[str, Any]:
        """
        Load defaults from the JSON configuration file

        Raises:
            FileNotFoundError: If the defaults file doesn't exist
            json.JSONDecodeError: If the defaults file is invalid JSON
        """
        try:
            base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            full_path = os.path.join(base_dir, self.config_path)
            with open(full_path, "r", encoding="utf-8") as f:
                defaults = json.load(f)
            logger.info(f"Loaded defaults from {full_path}")
            return defaults

        except FileNotFoundError:
            logger.error(f"Defaults file not found: {self.config_path}")
            raise

        except json.JSONDecodeError as e:
            logger.error(f"Invalid JSON in defaults file: {e}")
            raise

    @staticmethod
    def load_document(path: str) -> Dict[str, Any]:
        """
        Read a user configuration document

        Raises:
            ConfigError: If the file is missing, not JSON, or not an object
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                document = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}")
        if not isinstance(document, dict):
            raise ConfigError(f"config document {path} must be a JSON object")
        return document

    def scenarios(self) -> list:
        return list(self.defaults.get("scenarios", {}).keys())

    def scenario(self, name: str) -> Dict[str, Any]:
        """
        Overrides of a named scenario

        Raises:
            ConfigError: If the scenario is unknown
        """
        scenarios = self.defaults.get("scenarios", {})
        if name not in scenarios:
            raise ConfigError(f"unknown scenario '{name}', available: {', '.join(scenarios) or 'none'}")
        return scenarios[name]

    def resolve(
        self,
        document: Optional[Dict[str, Any]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> RunConfig:
        """
        Merge defaults, scenario, user document and flag overrides, then validate

        A snapshot written by a previous run resolves to the same RunConfig.

        Args:
            document: User configuration; an optional "scenario" key selects a named scenario
            overrides: Flag values (None entries are ignored)

        Returns:
            Validated RunConfig

        Raises:
            ConfigError: Naming the violated constraint
        """
        document = dict(document or {})
        merged = self.defaults.get("run", {})
        scenario_name = document.pop("scenario", None)
        if scenario_name:
            merged = deep_merge(merged, self.scenario(scenario_name))
        merged = deep_merge(merged, document)
        merged = deep_merge(merged, {k: v for k, v in (overrides or {}).items() if v is not None})

        try:
            config = RunConfig.model_validate(merged)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
            )
            logger.error(f"Invalid configuration: {problems}")
            raise ConfigError(problems) from e

        logger.info(
            f"Resolved config: n={config.n_modes}, M={config.grid_points}, T={config.T}, "
            f"dt={config.dt}, scheme={config.scheme.value}"
        )
        return config


# Global instance for easy access
_config_manager = None


def get_config_manager() -> ConfigManager:
    """
    Get global config manager instance (singleton pattern)

    Returns:
        ConfigManager instance
    """
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager
