"""Durable account records: JSON-lines file, one account per line.

Writes are flushed and fsynced before they are acknowledged.  Loading is
strict: a malformed or duplicate line aborts startup with the offending
line number rather than silently skipping data.
"""

import json
import os
from dataclasses import dataclass

from .graphs import DecodeError, brute_force_isomorphism, deserialize_graph


class AccountStoreError(Exception):
    """Account file cannot be loaded or written."""


@dataclass(frozen=True)
class AccountRecord:
    login: str
    n: int
    hash_id: str
    g1_hex: str
    g2_hex: str
    created_at: float

    def __post_init__(self):
        if not self.login:
            raise ValueError("login must be nonempty")
        for label, value in (("g1", self.g1_hex), ("g2", self.g2_hex)):
            try:
                graph = deserialize_graph(bytes.fromhex(value))
            except (ValueError, DecodeError) as exc:
                raise ValueError(f"{label} does not decode: {exc}") from exc
            if graph.n != self.n:
                raise ValueError(f"{label} has n={graph.n}, record says {self.n}")

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "login": self.login,
                "n": self.n,
                "hash_id": self.hash_id,
                "g1": self.g1_hex,
                "g2": self.g2_hex,
                "created_at": self.created_at,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json_line(cls, line: str) -> "AccountRecord":
        data = json.loads(line)
        if not isinstance(data, dict):
            raise ValueError("line is not a JSON object")
        try:
            return cls(
                login=data["login"],
                n=int(data["n"]),
                hash_id=data["hash_id"],
                g1_hex=data["g1"],
                g2_hex=data["g2"],
                created_at=float(data["created_at"]),
            )
        except KeyError as exc:
            raise ValueError(f"missing field {exc.args[0]!r}") from exc


class AccountStore:
    """Append-only account persistence with strict load-time validation."""

    def __init__(self, path: str):
        self.path = path
        self._records: dict[str, AccountRecord] = {}
        self._load()

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            raw = fh.read()
        if raw and not raw.endswith(b"\n"):
            raise AccountStoreError(f"{self.path}: truncated final line (missing newline)")
        for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
            if not line.strip():
                raise AccountStoreError(f"{self.path}:{lineno}: blank line")
            try:
                record = AccountRecord.from_json_line(line)
            except (ValueError, json.JSONDecodeError) as exc:
                raise AccountStoreError(f"{self.path}:{lineno}: {exc}") from exc
            if record.login in self._records:
                raise AccountStoreError(f"{self.path}:{lineno}: duplicate login {record.login!r}")
            self._records[record.login] = record

    def get(self, login: str) -> AccountRecord | None:
        return self._records.get(login)

    def append(self, record: AccountRecord):
        if record.login in self._records:
            raise AccountStoreError(f"login {record.login!r} already stored")
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(record.to_json_line() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._records[record.login] = record

    def logins(self) -> list[str]:
        return list(self._records)

    def __len__(self):
        return len(self._records)


def audit_small_accounts(store: AccountStore, max_n: int = 10) -> dict[str, bool]:
    """Offline audit: confirm g1 and g2 really are isomorphic for every
    account small enough for the brute-force oracle.  Returns login -> ok.
    """
    results = {}
    for login in store.logins():
        record = store.get(login)
        if record.n > max_n:
            continue
        g1 = deserialize_graph(bytes.fromhex(record.g1_hex))
        g2 = deserialize_graph(bytes.fromhex(record.g2_hex))
        results[login] = brute_force_isomorphism(g1, g2) is not None
    return results
