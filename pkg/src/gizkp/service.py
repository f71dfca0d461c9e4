"""Network-facing verifier: registration, proof sessions, lockout policy.

The server stores only each account's public graph pair.  It never
receives a password or the secret permutation; authentication is the
interactive proof driven through /v1/session endpoints.

Online-guessing countermeasures: session starts are delayed by
min(base * 2**failures, cap), and an account locks hard for a fixed
window once consecutive failed sessions reach the threshold.  Unknown
logins get byte-identical errors and the same delay treatment as failed
proofs, so the error channel does not reveal whether an account exists.

All shared state is guarded by one lock; handlers do strict
read-modify-write under it (delays sleep outside the lock).
"""

import logging
import random
import threading
import time
from dataclasses import dataclass

from .config import Config
from .graphs import DecodeError, Graph, deserialize_graph, deserialize_permutation
from .kdf import PublicPair, resolve_hash
from .protocol import Challenge, Response, verifier_verify
from .storage import AccountRecord, AccountStore

logger = logging.getLogger("gizkp.service")

AWAIT_COMMIT = "await_commit"
AWAIT_RESPONSE = "await_response"

_MAX_LOGIN_BYTES = 256


class ApiError(Exception):
    """Error response: stable error_code plus human-readable message."""

    def __init__(self, status: int, error_code: str, message: str, retry_after_ms: int | None = None):
        super().__init__(message)
        self.status = status
        self.error_code = error_code
        self.message = message
        self.retry_after_ms = retry_after_ms


def _auth_failed() -> ApiError:
    # Shared by unknown-login and failed-proof paths; the bodies must stay
    # byte-identical so the error channel cannot enumerate accounts.
    return ApiError(401, "unknown_or_failed", "authentication failed")


def _malformed(message: str) -> ApiError:
    return ApiError(400, "malformed", message)


class SystemClock:
    def now(self) -> float:
        return time.time()

    def sleep(self, seconds: float):
        if seconds > 0:
            time.sleep(seconds)


@dataclass
class LockoutState:
    failures: int = 0
    locked_until: float | None = None


@dataclass
class SessionRecord:
    session_id: str
    login: str
    pair: PublicPair
    n: int
    rounds_total: int
    round_index: int = 0
    phase: str = AWAIT_COMMIT
    pending_h: Graph | None = None
    pending_b: int | None = None
    expires_at: float = 0.0


class VerifierService:
    """Protocol verifier plus account/session/lockout bookkeeping."""

    def __init__(self, config: Config, accounts: AccountStore | None = None, clock=None,
                 rng: random.Random | None = None, pre_session_hook=None):
        self.config = config
        self.accounts = accounts if accounts is not None else AccountStore(config.account_store)
        self.clock = clock if clock is not None else SystemClock()
        self.rng = rng if rng is not None else random.SystemRandom()
        # CAPTCHA-style gate run before any session work; may raise ApiError.
        self.pre_session_hook = pre_session_hook
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionRecord] = {}
        self._session_by_login: dict[str, str] = {}
        self._lockouts: dict[str, LockoutState] = {}
        self._tokens: dict[str, tuple[str, float]] = {}

    # -- registration -------------------------------------------------

    def register(self, payload: dict) -> dict:
        login = _require_str(payload, "login")
        if not login or len(login.encode()) > _MAX_LOGIN_BYTES:
            raise _malformed("login must be 1..256 bytes")
        n = _require_int(payload, "n")
        if not 1 <= n <= 1024:
            raise _malformed("n must be in [1, 1024]")
        hash_id = _require_str(payload, "hash_id")
        try:
            resolve_hash(hash_id)
        except ValueError as exc:
            raise _malformed(str(exc)) from exc
        g1_hex = _require_hex(payload, "g1")
        g2_hex = _require_hex(payload, "g2")
        g1 = _decode_graph(g1_hex, n)
        g2 = _decode_graph(g2_hex, n)
        with self._lock:
            existing = self.accounts.get(login)
            if existing is not None:
                same = (existing.n == n and existing.hash_id == hash_id
                        and existing.g1_hex == g1_hex and existing.g2_hex == g2_hex)
                if same:
                    return {"status": "created"}
                raise ApiError(409, "conflict", "login already registered with different material")
            record = AccountRecord(login=login, n=n, hash_id=hash_id, g1_hex=g1_hex,
                                   g2_hex=g2_hex, created_at=self.clock.now())
            self.accounts.append(record)
        if g1 == g2:
            logger.warning("weak registration for %r: g1 == g2", login)
        logger.info("registered %r (n=%d)", login, n)
        return {"status": "created"}

    # -- session lifecycle --------------------------------------------

    def start_session(self, payload: dict) -> dict:
        login = _require_str(payload, "login")
        if not login or len(login.encode()) > _MAX_LOGIN_BYTES:
            raise _malformed("login must be 1..256 bytes")
        if self.pre_session_hook is not None:
            self.pre_session_hook(login)
        with self._lock:
            now = self.clock.now()
            lockout = self._lockouts.setdefault(login, LockoutState())
            if lockout.locked_until is not None:
                if now < lockout.locked_until:
                    remaining_ms = int((lockout.locked_until - now) * 1000)
                    raise ApiError(429, "locked", "account locked", retry_after_ms=remaining_ms)
                lockout.locked_until = None
            delay = self._next_delay(lockout)
        # The delay applies before the account lookup so unknown logins get
        # the same timing treatment as failing ones.
        self.clock.sleep(delay)
        with self._lock:
            now = self.clock.now()
            account = self.accounts.get(login)
            if account is None:
                self._count_failure(login, now)
                raise _auth_failed()
            pair = PublicPair(
                deserialize_graph(bytes.fromhex(account.g1_hex)),
                deserialize_graph(bytes.fromhex(account.g2_hex)),
            )
            old_sid = self._session_by_login.pop(login, None)
            if old_sid is not None:
                self._sessions.pop(old_sid, None)
            session_id = f"{self.rng.getrandbits(128):032x}"
            record = SessionRecord(
                session_id=session_id,
                login=login,
                pair=pair,
                n=account.n,
                rounds_total=self.config.rounds_total,
                expires_at=now + self.config.session_ttl_seconds,
            )
            self._sessions[session_id] = record
            self._session_by_login[login] = session_id
            return {"session_id": session_id, "n": account.n, "rounds_total": record.rounds_total}

    def submit_commitment(self, session_id: str, payload: dict) -> dict:
        with self._lock:
            session = self._live_session(session_id)
            if session.phase != AWAIT_COMMIT:
                self._reject_session(session)
                raise ApiError(409, "bad_state", "commitment not expected in this phase")
            try:
                h = _decode_graph(_require_hex(payload, "h"), session.n)
            except ApiError:
                self._reject_session(session)
                raise
            session.pending_h = h
            session.pending_b = 1 + self.rng.randrange(2)
            session.phase = AWAIT_RESPONSE
            return {"b": session.pending_b}

    def submit_response(self, session_id: str, payload: dict) -> dict:
        with self._lock:
            session = self._live_session(session_id)
            if session.phase != AWAIT_RESPONSE:
                self._reject_session(session)
                raise ApiError(409, "bad_state", "response not expected in this phase")
            chi_hex = _require_hex(payload, "chi")
            try:
                chi = deserialize_permutation(bytes.fromhex(chi_hex))
            except DecodeError as exc:
                self._reject_session(session)
                raise _malformed(f"chi does not decode: {exc}") from exc
            result = verifier_verify(session.pair, session.pending_h,
                                     Challenge(session.pending_b), Response(chi))
            if result.cause == "protocol_error":
                self._reject_session(session)
                raise _malformed("response does not fit this session")
            if not result.accepted:
                self._reject_session(session)
                logger.info("session for %r rejected at round %d", session.login, session.round_index + 1)
                raise _auth_failed()
            session.round_index += 1
            session.pending_h = None
            session.pending_b = None
            if session.round_index >= session.rounds_total:
                session.phase = "accepted"
                self._drop_session(session)
                self._lockouts.pop(session.login, None)
                token = f"{self.rng.getrandbits(128):032x}"
                self._tokens[token] = (session.login, self.clock.now() + self.config.token_ttl_seconds)
                logger.info("session for %r accepted after %d rounds", session.login, session.round_index)
                return {"verdict": "accepted", "token": token}
            session.phase = AWAIT_COMMIT
            return {"round": "pass", "next": AWAIT_COMMIT}

    def verify_token(self, token: str) -> str | None:
        with self._lock:
            entry = self._tokens.get(token)
            if entry is None:
                return None
            login, expires_at = entry
            if self.clock.now() > expires_at:
                self._tokens.pop(token, None)
                return None
            return login

    # -- internals ----------------------------------------------------

    def _next_delay(self, lockout: LockoutState) -> float:
        base = self.config.lockout_base_delay_ms
        if base <= 0:
            return 0.0
        exponent = min(lockout.failures, 63)
        return min(base << exponent, self.config.lockout_delay_cap_ms) / 1000.0

    def _count_failure(self, login: str, now: float):
        lockout = self._lockouts.setdefault(login, LockoutState())
        lockout.failures += 1
        if lockout.failures >= self.config.lockout_threshold:
            lockout.locked_until = now + self.config.lockout_lock_seconds
            logger.warning("account %r locked after %d consecutive failures", login, lockout.failures)

    def _live_session(self, session_id: str) -> SessionRecord:
        session = self._sessions.get(session_id)
        if session is None:
            raise ApiError(410, "expired", "session expired or unknown")
        if self.clock.now() > session.expires_at:
            self._drop_session(session)
            raise ApiError(410, "expired", "session expired or unknown")
        return session

    def _drop_session(self, session: SessionRecord):
        self._sessions.pop(session.session_id, None)
        if self._session_by_login.get(session.login) == session.session_id:
            self._session_by_login.pop(session.login, None)

    def _reject_session(self, session: SessionRecord):
        session.phase = "rejected"
        self._drop_session(session)
        self._count_failure(session.login, self.clock.now())


# -- payload validation helpers ---------------------------------------


def _require_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise _malformed(f"field {key!r} must be a string")
    return value


def _require_int(payload: dict, key: str) -> int:
    value = payload.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise _malformed(f"field {key!r} must be an integer")
    return value


def _require_hex(payload: dict, key: str) -> str:
    value = _require_str(payload, key)
    if value != value.lower():
        raise _malformed(f"field {key!r} must be lowercase hex")
    try:
        bytes.fromhex(value)
    except ValueError:
        raise _malformed(f"field {key!r} must be valid hex") from None
    return value


def _decode_graph(hex_value: str, n: int):
    try:
        graph = deserialize_graph(bytes.fromhex(hex_value))
    except DecodeError as exc:
        raise _malformed(f"graph does not decode: {exc}") from exc
    if graph.n != n:
        raise _malformed(f"graph has n={graph.n}, expected {n}")
    return graph


def create_app(service: VerifierService):
    """FastAPI wrapper over the service; JSON in, JSON out."""
    from fastapi import Body, FastAPI
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import JSONResponse

    app = FastAPI(title="gizkp verifier", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.service = service

    @app.exception_handler(ApiError)
    def handle_api_error(_request, exc: ApiError):
        body = {"error_code": exc.error_code, "message": exc.message}
        if exc.retry_after_ms is not None:
            body["retry_after_ms"] = exc.retry_after_ms
        return JSONResponse(body, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    def handle_validation_error(_request, _exc):
        return JSONResponse({"error_code": "malformed", "message": "request body must be a JSON object"},
                            status_code=400)

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/register", status_code=201)
    def register(payload: dict = Body()):
        return service.register(payload)

    @app.post("/v1/session")
    def start_session(payload: dict = Body()):
        return service.start_session(payload)

    @app.post("/v1/session/{session_id}/commit")
    def submit_commitment(session_id: str, payload: dict = Body()):
        return service.submit_commitment(session_id, payload)

    @app.post("/v1/session/{session_id}/respond")
    def submit_response(session_id: str, payload: dict = Body()):
        return service.submit_response(session_id, payload)

    if service.config.static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=service.config.static_dir, html=True), name="app")

    return app
