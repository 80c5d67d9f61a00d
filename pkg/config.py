from pydantic_settings import BaseSettings
from pydantic import ValidationError
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union
import json
import os
from dotenv import load_dotenv

from errors import ConfigError
from schemas.config import RunConfig

# Load environment variables from .env file for local development.
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "configs" / "default.json"


class Settings(BaseSettings):
    """
    Runtime settings of the pricer.

    """

    # Run configuration used when --config is not given
    DRAWDOWN_CDS_CONFIG: str = os.getenv("DRAWDOWN_CDS_CONFIG", str(DEFAULT_CONFIG_PATH))

    # Root log level of the CLI
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING")

    # Threads used for Monte Carlo batches
    MC_WORKERS: int = int(os.getenv("MC_WORKERS", "1"))

    class Config:
        # Specify the .env file for loading environment variables.
        env_file = ".env"
        env_file_encoding = "utf-8"


@lru_cache()
def get_settings() -> Settings:
    return Settings()


def _parse_scalar(raw: str) -> Any:
    # JSON scalars (numbers, true/false, null) and lists; anything else stays a string
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(document: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """
    Apply ``key.path=value`` overrides to a nested configuration document.

    :param document: Parsed JSON document, modified in place.
    :param overrides: Overrides such as ``model.sigma=0.2`` or ``numerics.mc.n_paths=1000``.
    :return: The updated document.
    :raises ConfigError: If an override is malformed or walks through a non-object value.
    """
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override '{override}' must have the form key.path=value")
        parts = key.strip().split(".")
        node = document
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override '{override}': '{part}' is not a config block")
            node = child
        node[parts[-1]] = _parse_scalar(raw.strip())
    return document


def _describe(exc: ValidationError) -> str:
    messages = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "config"
        messages.append(f"{location}: {error['msg']}")
    return "; ".join(messages)


def load_run_config(
    path: Optional[Union[str, Path]] = None, overrides: Iterable[str] = ()
) -> RunConfig:
    """
    Read, override and validate a run configuration.

    :param path: JSON config file; defaults to Settings.DRAWDOWN_CDS_CONFIG.
    :param overrides: ``key.path=value`` strings applied before validation.
    :return: The validated run configuration.
    :raises ConfigError: If the file is missing or malformed, or validation fails.
    """
    source = Path(path) if path is not None else Path(get_settings().DRAWDOWN_CDS_CONFIG)
    if not source.is_absolute() and not source.exists() and (PROJECT_ROOT / source).exists():
        source = PROJECT_ROOT / source
    try:
        document = json.loads(source.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {source}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {source} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"config file {source} must contain a JSON object")

    document = apply_overrides(document, overrides)
    try:
        return RunConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {_describe(exc)}") from exc
