"""Run configuration and the bundled defaults."""

from modemix.config.loader import (
    CONFIG_SCHEMA_VERSION,
    Backend,
    ProjectConfig,
    load_config,
)

__all__ = ["CONFIG_SCHEMA_VERSION", "Backend", "ProjectConfig", "load_config"]
