"""Runtime configuration shared by the verifier service and the CLI.

Values come from a JSON config file (``--config``), then environment
variables prefixed ``GIZKP_`` (e.g. ``GIZKP_PORT``), then built-in
defaults; later sources win.
"""

import json
import os
from dataclasses import dataclass, fields, replace

DEFAULT_PORT = 8321


@dataclass(frozen=True)
class Config:
    # Service
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    rounds_total: int = 10
    account_store: str = "accounts.jsonl"
    session_ttl_seconds: float = 120.0
    token_ttl_seconds: float = 3600.0
    lockout_base_delay_ms: int = 100
    lockout_delay_cap_ms: int = 5000
    lockout_threshold: int = 5
    lockout_lock_seconds: float = 900.0
    static_dir: str | None = None
    # Client-side key derivation defaults
    n: int = 128
    hash_id: str = "sha256"
    server_url: str = f"http://127.0.0.1:{DEFAULT_PORT}"

    def __post_init__(self):
        if not 1 <= self.rounds_total <= 64:
            raise ValueError("rounds_total must be in [1, 64]")
        if not 1 <= self.port <= 65535:
            raise ValueError("port out of range")
        if self.lockout_base_delay_ms < 0 or self.lockout_delay_cap_ms < 0:
            raise ValueError("lockout delays must be nonnegative")
        if self.lockout_threshold < 1:
            raise ValueError("lockout_threshold must be >= 1")


_ENV_PREFIX = "GIZKP_"
_INT_FIELDS = {"port", "rounds_total", "lockout_base_delay_ms", "lockout_delay_cap_ms", "lockout_threshold", "n"}
_FLOAT_FIELDS = {"session_ttl_seconds", "token_ttl_seconds", "lockout_lock_seconds"}


def _coerce(name: str, raw):
    if name in _INT_FIELDS:
        return int(raw)
    if name in _FLOAT_FIELDS:
        return float(raw)
    return raw


def load_config(path: str | None = None, env: dict | None = None) -> Config:
    """Merge defaults, an optional JSON file, and GIZKP_* env overrides."""
    env = os.environ if env is None else env
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(Config)}
        for key, value in data.items():
            if key not in known:
                raise ValueError(f"{path}: unknown config key {key!r}")
            values[key] = _coerce(key, value)
    config = Config(**values)
    overrides = {}
    for f in fields(Config):
        raw = env.get(_ENV_PREFIX + f.name.upper())
        if raw is not None:
            overrides[f.name] = _coerce(f.name, raw)
    return replace(config, **overrides) if overrides else config
