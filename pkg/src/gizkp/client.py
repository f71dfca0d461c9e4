"""HTTP client for the verifier service, plus the register/login flows.

Key derivation and every response computation happen here, on the
client; only the login, public graphs, and round messages go on the
wire.  The password never does.
"""

import random
from dataclasses import dataclass

import httpx

from .graphs import serialize_graph, serialize_permutation
from .kdf import Credentials, KdfParams, derive_identity
from .protocol import SYSTEM_RANDOM, Challenge, HonestProver


class TransportError(Exception):
    """Could not reach the server or got a non-protocol reply."""


class ServerRefusal(Exception):
    """Server answered with an error body."""

    def __init__(self, status: int, error_code: str, message: str, retry_after_ms: int | None = None):
        super().__init__(f"{error_code}: {message}")
        self.status = status
        self.error_code = error_code
        self.message = message
        self.retry_after_ms = retry_after_ms


class ApiClient:
    """Thin JSON wrapper over the /v1 endpoints."""

    def __init__(self, base_url: str, http: httpx.Client | None = None, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self._http = http if http is not None else httpx.Client(timeout=timeout)

    def close(self):
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._http.post(self.base_url + path, json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(f"POST {path}: {exc}") from exc
        try:
            body = response.json()
        except ValueError as exc:
            raise TransportError(f"POST {path}: non-JSON reply (status {response.status_code})") from exc
        if response.status_code >= 400:
            if isinstance(body, dict) and "error_code" in body:
                raise ServerRefusal(response.status_code, body["error_code"],
                                    body.get("message", ""), body.get("retry_after_ms"))
            raise TransportError(f"POST {path}: unexpected status {response.status_code}")
        return body

    def healthz(self) -> bool:
        try:
            response = self._http.get(self.base_url + "/v1/healthz")
        except httpx.HTTPError as exc:
            raise TransportError(f"GET /v1/healthz: {exc}") from exc
        return response.status_code == 200

    def register(self, login: str, n: int, hash_id: str, g1_hex: str, g2_hex: str) -> dict:
        return self._post("/v1/register", {"login": login, "n": n, "hash_id": hash_id,
                                           "g1": g1_hex, "g2": g2_hex})

    def start_session(self, login: str) -> dict:
        return self._post("/v1/session", {"login": login})

    def commit(self, session_id: str, h_hex: str) -> int:
        return int(self._post(f"/v1/session/{session_id}/commit", {"h": h_hex})["b"])

    def respond(self, session_id: str, chi_hex: str) -> dict:
        return self._post(f"/v1/session/{session_id}/respond", {"chi": chi_hex})


@dataclass(frozen=True)
class LoginOutcome:
    accepted: bool
    token: str | None
    rounds_completed: int
    error_code: str | None = None


def register_account(api: ApiClient, credentials: Credentials, params: KdfParams) -> dict:
    """Derive the identity locally and register only the public pair."""
    identity = derive_identity(credentials, params)
    return api.register(
        credentials.login,
        params.n,
        params.hash_id,
        serialize_graph(identity.public_pair.g1).hex(),
        serialize_graph(identity.public_pair.g2).hex(),
    )


def login_account(
    api: ApiClient,
    credentials: Credentials,
    hash_id: str = "sha256",
    rng: random.Random = SYSTEM_RANDOM,
) -> LoginOutcome:
    """Re-derive the secret and drive all proof rounds against the server.

    The graph size comes from the server's session reply, so the client
    re-derives at whatever size the account was registered with.
    """
    session = api.start_session(credentials.login)
    session_id = session["session_id"]
    rounds_total = int(session["rounds_total"])
    identity = derive_identity(credentials, KdfParams(n=int(session["n"]), hash_id=hash_id))
    prover = HonestProver(identity, rng)
    for round_index in range(rounds_total):
        commitment = prover.commit()
        b = api.commit(session_id, serialize_graph(commitment.h).hex())
        response = prover.respond(Challenge(b))
        try:
            reply = api.respond(session_id, serialize_permutation(response.chi).hex())
        except ServerRefusal as exc:
            return LoginOutcome(False, None, round_index, exc.error_code)
        if reply.get("verdict") == "accepted":
            return LoginOutcome(True, reply.get("token"), round_index + 1)
    return LoginOutcome(False, None, rounds_total, "incomplete")
