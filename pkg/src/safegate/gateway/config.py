"""Gateway configuration: YAML file plus environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

KEY_ENV = "SAFEGATE_KEY"


@dataclass
class SafegateConfig:
    store_dir: str = "safegate-data"
    outbox_dir: str = ""  # default: <store_dir>/outbox
    key_path: str = ""
    relock_interval_s: float = 30.0
    notify_interval_s: float = 180.0
    area_threshold: int = 400
    strategy: str = "binary:20"
    closing_iterations: int = 1
    recipient: str = "resident"
    harmful_lexicon: tuple = ("gun", "mask", "baseball bat")
    token_ttl_s: float = 300.0
    recordings_window_min: int = 60
    segment_gap_ms: int = 5000
    host: str = "127.0.0.1"
    port: int = 8321
    key: bytes = b""  # resolved at load time, never serialized back out

    def __post_init__(self):
        if not self.outbox_dir:
            self.outbox_dir = str(Path(self.store_dir) / "outbox")

    def resolve_key(self, env=None, allow_generate: bool = True) -> bytes:
        """Key from the environment, the key file, or freshly minted.

        A generated key is written next to the store with owner-only
        permissions so later runs reuse it.
        """
        from .. import crypto

        env = os.environ if env is None else env
        value = env.get(KEY_ENV, "").strip()
        if value:
            self.key = value.encode("ascii")
            return self.key
        path = Path(self.key_path) if self.key_path else Path(self.store_dir) / "key"
        if path.exists():
            self.key = path.read_text().strip().encode("ascii")
            return self.key
        if not allow_generate:
            raise FileNotFoundError(f"no key in ${KEY_ENV} and no key file at {path}")
        key = crypto.generate_key()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(key.decode("ascii") + "\n")
        os.chmod(path, 0o600)
        self.key = key
        return key


def load_config(path=None, overrides: dict | None = None) -> SafegateConfig:
    """Read a YAML config file (optional) and apply overrides."""
    data = {}
    if path is not None:
        raw = Path(path).read_text()
        loaded = yaml.safe_load(raw) or {}
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a mapping")
        data.update(loaded)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    known = {f for f in SafegateConfig.__dataclass_fields__ if f != "key"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SafegateConfig(**data)
