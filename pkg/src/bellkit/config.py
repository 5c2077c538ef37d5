# Copyright (C) 2026 StarHuntingGames
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""Settings, tolerances and optimizer configuration.

Values resolve from built-in defaults, then an optional YAML file
(``BELLKIT_CONFIG``, default ``conf/bellkit.yaml``), then environment
variables. ``${ENV_VAR}`` placeholders in the YAML file are expanded at
load time.
"""

from __future__ import annotations

import logging
import os
import re
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, Field

LOGGER = logging.getLogger("bellkit.config")

ALGEBRAIC_TOL = 1e-10
OPTIMIZATION_TOL = 1e-6
COEFFICIENT_TOL = 1e-9
MC_SIGMAS = 3.0

DEFAULT_CONFIG_PATH = "conf/bellkit.yaml"
DEFAULT_SEED = 20080101
DEFAULT_MAX_QUBITS = 10
DEFAULT_MEMORY_BUDGET = 4**10

_ENV_PATTERN = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


class OptimizerConfig(BaseModel):
    """Random-restart coordinate search settings."""

    restarts: int = Field(default=64, gt=0)
    max_iters: int = Field(default=500, gt=0)
    step_tol: float = Field(default=1e-8, gt=0)
    value_tol: float = Field(default=1e-6, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)


class Settings(BaseModel):
    threads: int = Field(default=1, gt=0)
    max_qubits: int = Field(default=DEFAULT_MAX_QUBITS, gt=0)
    memory_budget: int = Field(default=DEFAULT_MEMORY_BUDGET, gt=0)
    restarts: int = Field(default=64, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    log_level: str = "INFO"

    def optimizer(self, **overrides: Any) -> OptimizerConfig:
        values: dict[str, Any] = {"restarts": self.restarts, "seed": self.seed}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return OptimizerConfig(**values)


def expand_env(value: Any) -> Any:
    if isinstance(value, str):
        return _ENV_PATTERN.sub(lambda match: os.getenv(match.group(1), ""), value)
    if isinstance(value, dict):
        return {key: expand_env(item) for key, item in value.items()}
    if isinstance(value, list):
        return [expand_env(item) for item in value]
    return value


def load_yaml_config(path: Optional[str] = None) -> dict[str, Any]:
    configured = path or (os.getenv("BELLKIT_CONFIG") or "").strip() or DEFAULT_CONFIG_PATH
    config_path = Path(configured)
    if not config_path.is_file():
        return {}
    try:
        with config_path.open("r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle) or {}
    except (OSError, yaml.YAMLError) as error:
        LOGGER.warning("failed to read config file %s: %s", config_path, error)
        return {}
    if not isinstance(raw, dict):
        LOGGER.warning("ignoring config file %s: top level is not a mapping", config_path)
        return {}
    return expand_env(raw)


def _env_int(name: str) -> Optional[int]:
    configured = (os.getenv(name) or "").strip()
    if configured.isdigit() and int(configured) > 0:
        return int(configured)
    return None


def _coerce_int(value: Any) -> Optional[int]:
    text = str(value).strip()
    if text.isdigit() and int(text) > 0:
        return int(text)
    return None


def resolve_threads(file_values: Optional[dict[str, Any]] = None) -> int:
    configured = _env_int("BELLKIT_THREADS")
    if configured is not None:
        return configured
    fallback = _coerce_int((file_values or {}).get("threads", ""))
    if fallback is not None:
        return fallback
    return 1


def load_settings(path: Optional[str] = None) -> Settings:
    file_values = load_yaml_config(path)
    values: dict[str, Any] = {}
    for key in ("max_qubits", "memory_budget", "restarts", "seed"):
        coerced = _coerce_int(file_values.get(key, ""))
        if coerced is not None:
            values[key] = coerced
    level = str(file_values.get("log_level", "")).strip().upper()
    if level:
        values["log_level"] = level

    values["threads"] = resolve_threads(file_values)
    for key, env_name in (
        ("max_qubits", "BELLKIT_MAX_QUBITS"),
        ("memory_budget", "BELLKIT_MEMORY_BUDGET"),
        ("restarts", "BELLKIT_RESTARTS"),
        ("seed", "BELLKIT_SEED"),
    ):
        configured = _env_int(env_name)
        if configured is not None:
            values[key] = configured
    env_level = (os.getenv("BELLKIT_LOG_LEVEL") or "").strip().upper()
    if env_level:
        values["log_level"] = env_level
    return Settings(**values)


_SETTINGS: Optional[Settings] = None


def get_settings() -> Settings:
    global _SETTINGS
    if _SETTINGS is None:
        _SETTINGS = load_settings()
    return _SETTINGS


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads file and environment."""
    global _SETTINGS
    _SETTINGS = None
