from .loader import ConfigLoader, resolve_config_path
from .schema import (
    BinConfig,
    Config,
    EngineConfig,
    LoggingConfig,
    RunConfig,
    SkgConfig,
)

__all__ = [
    "BinConfig",
    "Config",
    "ConfigLoader",
    "EngineConfig",
    "LoggingConfig",
    "RunConfig",
    "SkgConfig",
    "resolve_config_path",
]
