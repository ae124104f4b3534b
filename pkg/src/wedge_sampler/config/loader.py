import os
from pathlib import Path

import structlog
import yaml
from pydantic import ValidationError

from .schema import Config

logger = structlog.get_logger(__name__)

CONFIG_ENV_VAR = "WEDGE_SAMPLER_CONFIG"
DEFAULT_CONFIG_PATH = Path("config/wedge_sampler.yaml")


def resolve_config_path(explicit: Path | None = None) -> Path:
    """Pick the config file: explicit flag, then environment, then the default."""
    if explicit is not None:
        return explicit
    from_env = os.environ.get(CONFIG_ENV_VAR)
    if from_env:
        return Path(from_env)
    return DEFAULT_CONFIG_PATH


class ConfigLoader:
    """Reads the YAML config once per run.

    A missing, unreadable or invalid file yields the defaults; the problem
    is logged rather than raised so that flags alone can drive a run.
    """

    def __init__(self, config_path: Path):
        self.config_path = config_path
        self._config: Config | None = None

    def load(self) -> Config:
        self._config = self._read()
        return self._config

    def get_config(self) -> Config:
        if self._config is None:
            return self.load()
        return self._config

    def _read(self) -> Config:
        path = str(self.config_path)
        if not self.config_path.exists():
            logger.info("config file not found, using defaults", path=path)
            return Config()

        try:
            data = yaml.safe_load(self.config_path.read_text()) or {}
            if not isinstance(data, dict):
                raise TypeError(f"top level is {type(data).__name__}, not a mapping")
            config = Config(**data)
        except (OSError, yaml.YAMLError, ValidationError, TypeError) as e:
            logger.error("invalid config, using defaults", path=path, error=str(e))
            return Config()

        logger.info("config loaded", path=path, sections=sorted(data))
        return config
