"""Flat key-value configuration with CLI-over-file-over-default precedence.

The ``PREMSEL_CONFIG`` environment variable may point at a file of
``key = value`` lines (``#`` comments allowed).  Keys use the CLI flag
spelling without the leading dashes, e.g. ``trees = 300`` or
``sample-p = 0.3``.  An explicit command-line flag always wins; a config
entry beats the built-in default.
"""

from __future__ import annotations

import os

ENV_VAR = "PREMSEL_CONFIG"


class ConfigError(ValueError):
    pass


def load_config_file(path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{no}: expected 'key = value'")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ConfigError(f"{path}:{no}: empty key")
            values[key] = value
    return values


def load_env_config(environ=None) -> dict[str, str]:
    environ = os.environ if environ is None else environ
    path = environ.get(ENV_VAR)
    if not path:
        return {}
    return load_config_file(path)


def resolve(cli_value, config: dict[str, str], key: str, default, cast=str):
    """Pick the effective value: CLI flag, then config file, then default."""
    if cli_value is not None:
        return cli_value
    if key in config:
        raw = config[key]
        try:
            if cast is bool:
                if raw.lower() in ("1", "true", "yes", "on"):
                    return True
                if raw.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(raw)
            return cast(raw)
        except ValueError:
            raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from None
    return default
