"""TOML reading shared by the configuration and material loaders."""

import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from modemix.errors import ConfigError

if TYPE_CHECKING:
    from importlib.resources.abc import Traversable


def read_toml(source: "Path | Traversable") -> dict[str, Any]:
    """Read a TOML document, mapping parse errors to ConfigError."""
    try:
        with source.open("rb") as handle:
            return tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"File not found: {source}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Invalid TOML in {source}: {exc}") from None
