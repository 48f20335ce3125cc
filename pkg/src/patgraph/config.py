"""Service and CLI configuration: key=value file, PATGRAPH_* env overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "PATGRAPH_"


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8765
    snapshot_path: str | None = None
    lexicon_path: str | None = None
    dot_engine_path: str | None = None
    document_dir: str | None = None
    page_size: int = 25

    @classmethod
    def load(
        cls,
        config_file: "str | Path | None" = None,
        env: "dict[str, str] | None" = None,
        overrides: "dict[str, object] | None" = None,
    ) -> "ServiceConfig":
        """Defaults, then the config file, then PATGRAPH_* env, then overrides."""
        values: dict[str, object] = {}
        if config_file is not None:
            values.update(_read_config_file(Path(config_file)))
        environment = os.environ if env is None else env
        for field_info in fields(cls):
            env_key = ENV_PREFIX + field_info.name.upper()
            if env_key in environment:
                values[field_info.name] = environment[env_key]
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        known = {f.name: f for f in fields(cls)}
        cleaned: dict[str, object] = {}
        for key, value in values.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if known[key].type == "int" and isinstance(value, str):
                value = int(value)
            cleaned[key] = value
        return cls(**cleaned)

    def validate_paths(self) -> None:
        """Startup checks: directories must exist; snapshot parent must exist."""
        if self.snapshot_path:
            parent = Path(self.snapshot_path).parent
            if not parent.is_dir():
                raise ValueError(f"snapshot directory {parent} does not exist")
        if self.lexicon_path:
            parent = Path(self.lexicon_path).parent
            if not parent.is_dir():
                raise ValueError(f"lexicon directory {parent} does not exist")
        if self.document_dir and not Path(self.document_dir).is_dir():
            raise ValueError(f"document directory {self.document_dir} does not exist")


def _read_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
