# mixedtraces/dataflows/config.py

from typing import Any, Dict, Optional

import mixedtraces.default_config as default_config
from mixedtraces.errors import ConfigError

# Use default config but allow it to be overridden
_config: Optional[Dict] = None


def initialize_config():
    """Initialize the configuration with default values."""
    global _config
    if _config is None:
        _config = default_config.DEFAULT_CONFIG.copy()


def set_config(config: Dict):
    """Update the configuration with custom values; unknown keys are kept as echo-only entries."""
    initialize_config()
    _config.update(config)


def get_config() -> Dict:
    """Get a copy of the current configuration."""
    initialize_config()
    return _config.copy()


def resolve(key: str, value: Any = None) -> Any:
    """Explicit argument if given, else the configured value of `key`.

    Raises:
        ConfigError: `key` is neither passed nor configured
    """
    if value is not None:
        return value
    initialize_config()
    try:
        return _config[key]
    except KeyError:
        raise ConfigError(f"no configured value for {key!r}", operation="resolve") from None


initialize_config()
