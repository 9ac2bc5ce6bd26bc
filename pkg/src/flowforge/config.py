"""Service configuration with 12-factor layering.

Precedence: explicit overrides (CLI flags) over environment variables over
a config file.  Every field maps to an environment variable with the
``FLOWFORGE_`` prefix (FLOWFORGE_DATA_DIR, FLOWFORGE_THETA, ...).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .errors import FlowForgeError
from .repository import HashingEmbedder, RemoteEmbedder, Repository, RetrievalConfig

ENV_PREFIX = "FLOWFORGE_"

DEFAULT_DATA_DIR = "./flowforge-data"
DEFAULT_LISTEN_ADDR = "127.0.0.1:8466"


class ConfigurationError(FlowForgeError):
    code = "ConfigurationError"
    http_status = 500


@dataclass
class ServiceConfig:
    data_dir: Path = Path(DEFAULT_DATA_DIR)
    listen_addr: str = DEFAULT_LISTEN_ADDR
    llm_endpoint: Optional[str] = None
    llm_api_key: Optional[str] = None
    embed_provider: str = "deterministic"  # deterministic | remote
    k: int = 10
    theta: float = 0.6
    max_inflight_llm: int = 4

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.embed_provider not in ("deterministic", "remote"):
            raise ConfigurationError(
                f"embed_provider must be deterministic or remote, got {self.embed_provider!r}")
        if self.embed_provider == "remote" and not (self.llm_endpoint and self.llm_api_key):
            raise ConfigurationError(
                "remote embed_provider requires llm_endpoint and llm_api_key")
        if self.k < 1 or not (0.0 <= self.theta <= 1.0):
            raise ConfigurationError(f"bad retrieval bounds: k={self.k}, theta={self.theta}")
        if self.max_inflight_llm < 1:
            raise ConfigurationError("max_inflight_llm must be >= 1")

    def retrieval_config(self) -> RetrievalConfig:
        return RetrievalConfig(k=self.k, theta=self.theta)

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_addr.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigurationError(f"listen_addr must be host:port, got {self.listen_addr!r}")
        return host, int(port)

    def build_repository(self) -> Repository:
        if self.embed_provider == "remote":
            embedder = RemoteEmbedder(self.llm_endpoint, self.llm_api_key)
        else:
            embedder = HashingEmbedder()
        return Repository(self.data_dir, embedder)


_FIELD_PARSERS = {
    "data_dir": Path,
    "k": int,
    "theta": float,
    "max_inflight_llm": int,
}


def _coerce(name: str, value: Any) -> Any:
    parser = _FIELD_PARSERS.get(name)
    return parser(value) if parser is not None and value is not None else value


def load_config(
    config_file: Optional[Path | str] = None,
    env: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ServiceConfig:
    """Assemble configuration: file, then environment, then overrides."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}

    config_file = config_file or env.get(ENV_PREFIX + "CONFIG")
    if config_file:
        path = Path(config_file)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        text = path.read_text("utf-8")
        doc = yaml.safe_load(text) if path.suffix in (".yml", ".yaml") else json.loads(text)
        if not isinstance(doc, dict):
            raise ConfigurationError(f"config file must hold an object: {path}")
        values.update(doc)

    for f in fields(ServiceConfig):
        env_name = ENV_PREFIX + f.name.upper()
        if env_name in env:
            values[f.name] = env[env_name]

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return ServiceConfig(**{k: _coerce(k, v) for k, v in values.items()})
