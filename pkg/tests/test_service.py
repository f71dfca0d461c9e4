import logging
import random

import pytest
from fastapi.testclient import TestClient

from gizkp.config import Config
from gizkp.graphs import Graph, serialize_graph, serialize_permutation
from gizkp.protocol import Challenge, HonestProver
from gizkp.service import ApiError, VerifierService, create_app
from gizkp.storage import AccountStore

from helpers import ManualClock, derive_test_identity

N = 8


def make_service(tmp_path, rounds_total=2, clock=None, seed=1234, **overrides):
    config = Config(
        account_store=str(tmp_path / "accounts.jsonl"),
        rounds_total=rounds_total,
        **overrides,
    )
    clock = clock if clock is not None else ManualClock()
    service = VerifierService(config, clock=clock, rng=random.Random(seed))
    return service, clock


@pytest.fixture
def setup(tmp_path):
    service, clock = make_service(tmp_path)
    client = TestClient(create_app(service))
    return service, clock, client


def register_payload(login="alice", password="pw", n=N):
    identity = derive_test_identity(login, password, n)
    return {
        "login": login,
        "n": n,
        "hash_id": "sha256",
        "g1": serialize_graph(identity.public_pair.g1).hex(),
        "g2": serialize_graph(identity.public_pair.g2).hex(),
    }, identity


def drive_honest_session(client, identity, login, rng=None):
    """Run a session through the HTTP surface until verdict or first error."""
    rng = rng if rng is not None else random.Random(9)
    prover = HonestProver(identity, rng)
    start = client.post("/v1/session", json={"login": login})
    if start.status_code != 200:
        return start
    session = start.json()
    session_id = session["session_id"]
    reply = None
    for _ in range(session["rounds_total"]):
        commitment = prover.commit()
        committed = client.post(f"/v1/session/{session_id}/commit",
                                json={"h": serialize_graph(commitment.h).hex()})
        if committed.status_code != 200:
            return committed
        response = prover.respond(Challenge(committed.json()["b"]))
        reply = client.post(
            f"/v1/session/{session_id}/respond", json={"chi": serialize_permutation(response.chi).hex()}
        )
        if reply.status_code != 200:
            return reply
    return reply


class TestRegister:
    def test_created_and_durable(self, tmp_path):
        service, _clock = make_service(tmp_path)
        client = TestClient(create_app(service))
        payload, _ = register_payload()
        response = client.post("/v1/register", json=payload)
        assert response.status_code == 201
        assert response.json() == {"status": "created"}
        # restart: a fresh store sees the record
        reloaded = AccountStore(str(tmp_path / "accounts.jsonl"))
        assert reloaded.get("alice") is not None
        assert reloaded.get("alice").n == N

    def test_idempotent_same_material(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        assert client.post("/v1/register", json=payload).status_code == 201
        assert client.post("/v1/register", json=payload).status_code == 201

    def test_conflict_on_different_material(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        other, _ = register_payload(password="different")
        response = client.post("/v1/register", json=other)
        assert response.status_code == 409
        assert response.json()["error_code"] == "conflict"

    def test_malformed_graph_rejected(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        payload["g1"] = "zz"
        assert client.post("/v1/register", json=payload).json()["error_code"] == "malformed"
        payload["g1"] = "00000000"
        assert client.post("/v1/register", json=payload).json()["error_code"] == "malformed"

    def test_size_mismatch_rejected(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload(n=N)
        payload["n"] = N + 1
        response = client.post("/v1/register", json=payload)
        assert response.status_code == 400

    def test_uppercase_hex_rejected(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        payload["g1"] = payload["g1"].upper()
        assert client.post("/v1/register", json=payload).json()["error_code"] == "malformed"

    def test_unknown_hash_rejected(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        payload["hash_id"] = "md5"
        assert client.post("/v1/register", json=payload).status_code == 400

    def test_non_object_body_rejected(self, setup):
        _service, _clock, client = setup
        response = client.post("/v1/register", content=b"[1,2,3]", headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert response.json()["error_code"] == "malformed"

    def test_identical_public_graphs_logged_as_weak(self, setup, caplog):
        _service, _clock, client = setup
        g = Graph.from_edges(N, [(0, 1), (1, 2)])
        payload = {
            "login": "weakling",
            "n": N,
            "hash_id": "sha256",
            "g1": serialize_graph(g).hex(),
            "g2": serialize_graph(g).hex(),
        }
        with caplog.at_level(logging.WARNING, logger="gizkp.service"):
            assert client.post("/v1/register", json=payload).status_code == 201
        assert any("weak registration" in message for message in caplog.messages)


class TestSessionFlow:
    def test_honest_login_accepted(self, setup):
        service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        reply = drive_honest_session(client, identity, "alice")
        body = reply.json()
        assert body["verdict"] == "accepted"
        assert len(body["token"]) == 32
        assert service.verify_token(body["token"]) == "alice"

    def test_session_reply_shape(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        body = client.post("/v1/session", json={"login": "alice"}).json()
        assert set(body) == {"session_id", "n", "rounds_total"}
        assert body["n"] == N and body["rounds_total"] == 2

    def test_intermediate_round_reports_pass(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session = client.post("/v1/session", json={"login": "alice"}).json()
        prover = HonestProver(identity, random.Random(4))
        commitment = prover.commit()
        b = client.post(f"/v1/session/{session['session_id']}/commit",
                        json={"h": serialize_graph(commitment.h).hex()}).json()["b"]
        response = prover.respond(Challenge(b))
        reply = client.post(f"/v1/session/{session['session_id']}/respond",
                            json={"chi": serialize_permutation(response.chi).hex()})
        assert reply.json() == {"round": "pass", "next": "await_commit"}

    def test_commit_returns_side_choice(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session = client.post("/v1/session", json={"login": "alice"}).json()
        prover = HonestProver(identity, random.Random(4))
        reply = client.post(f"/v1/session/{session['session_id']}/commit",
                            json={"h": serialize_graph(prover.commit().h).hex()})
        assert reply.json()["b"] in (1, 2)

    def test_wrong_secret_rejected(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload(password="right")
        client.post("/v1/register", json=payload)
        wrong_identity = derive_test_identity("alice", "wrong", N)
        reply = drive_honest_session(client, wrong_identity, "alice")
        assert reply.status_code == 401
        assert reply.json()["error_code"] == "unknown_or_failed"


class TestAntiEnumeration:
    def test_unknown_login_and_failed_proof_bodies_are_byte_identical(self, setup):
        _service, _clock, client = setup
        payload, _ = register_payload(password="right")
        client.post("/v1/register", json=payload)
        unknown = client.post("/v1/session", json={"login": "ghost"})
        failed = drive_honest_session(client, derive_test_identity("alice", "wrong", N), "alice")
        assert unknown.status_code == failed.status_code == 401
        assert unknown.content == failed.content

    def test_unknown_login_gets_same_delay_schedule(self, tmp_path):
        service, clock = make_service(tmp_path)
        client = TestClient(create_app(service))
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        clock.sleeps.clear()
        for _ in range(3):
            client.post("/v1/session", json={"login": "ghost"})
        ghost_delays = list(clock.sleeps)
        clock.sleeps.clear()
        for _ in range(3):
            wrong = derive_test_identity("alice", "wrong", N)
            drive_honest_session(client, wrong, "alice")
        assert clock.sleeps == ghost_delays == [0.1, 0.2, 0.4]


class TestStateMachine:
    def _session(self, client, login="alice"):
        return client.post("/v1/session", json={"login": login}).json()["session_id"]

    def test_commit_twice_is_bad_state_and_voids_session(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        h_hex = serialize_graph(HonestProver(identity, random.Random(4)).commit().h).hex()
        assert client.post(f"/v1/session/{session_id}/commit", json={"h": h_hex}).status_code == 200
        second = client.post(f"/v1/session/{session_id}/commit", json={"h": h_hex})
        assert second.status_code == 409
        assert second.json()["error_code"] == "bad_state"
        # session was torn down: further calls see an expired session
        third = client.post(f"/v1/session/{session_id}/commit", json={"h": h_hex})
        assert third.status_code == 410

    def test_respond_without_commit_is_bad_state(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        chi_hex = serialize_permutation(identity.secret).hex()
        reply = client.post(f"/v1/session/{session_id}/respond", json={"chi": chi_hex})
        assert reply.status_code == 409
        assert reply.json()["error_code"] == "bad_state"

    def test_undecodable_commitment_rejects_session(self, setup):
        service, _clock, client = setup
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        reply = client.post(f"/v1/session/{session_id}/commit", json={"h": "deadbeef"})
        assert reply.status_code == 400
        assert client.post(f"/v1/session/{session_id}/commit", json={"h": "00"}).status_code == 410
        assert service._lockouts["alice"].failures == 1

    def test_wrong_size_commitment_counts_toward_lockout(self, setup):
        service, _clock, client = setup
        payload, _ = register_payload(n=N)
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        wrong = Graph.from_edges(N + 1, [(0, 1)])
        reply = client.post(f"/v1/session/{session_id}/commit", json={"h": serialize_graph(wrong).hex()})
        assert reply.status_code == 400
        assert service._lockouts["alice"].failures == 1

    def test_wrong_size_response_is_malformed_not_auth_failure(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        prover = HonestProver(identity, random.Random(4))
        client.post(f"/v1/session/{session_id}/commit", json={"h": serialize_graph(prover.commit().h).hex()})
        from gizkp.protocol import random_permutation

        short = serialize_permutation(random_permutation(N - 1, random.Random(5))).hex()
        reply = client.post(f"/v1/session/{session_id}/respond", json={"chi": short})
        assert reply.status_code == 400
        assert reply.json()["error_code"] == "malformed"

    def test_undecodable_response_is_malformed(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        prover = HonestProver(identity, random.Random(4))
        client.post(f"/v1/session/{session_id}/commit", json={"h": serialize_graph(prover.commit().h).hex()})
        reply = client.post(f"/v1/session/{session_id}/respond", json={"chi": "00"})
        assert reply.status_code == 400

    def test_unknown_session_is_expired(self, setup):
        _service, _clock, client = setup
        reply = client.post(f"/v1/session/{'0' * 32}/commit", json={"h": "00"})
        assert reply.status_code == 410
        assert reply.json()["error_code"] == "expired"

    def test_session_ttl(self, setup):
        _service, clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        session_id = self._session(client)
        clock.advance(121)
        h_hex = serialize_graph(HonestProver(identity, random.Random(4)).commit().h).hex()
        reply = client.post(f"/v1/session/{session_id}/commit", json={"h": h_hex})
        assert reply.status_code == 410
        assert reply.json()["error_code"] == "expired"

    def test_new_session_voids_old(self, setup):
        _service, _clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        first = self._session(client)
        second = self._session(client)
        assert first != second
        h_hex = serialize_graph(HonestProver(identity, random.Random(4)).commit().h).hex()
        assert client.post(f"/v1/session/{first}/commit", json={"h": h_hex}).status_code == 410
        assert client.post(f"/v1/session/{second}/commit", json={"h": h_hex}).status_code == 200


class TestLockout:
    def fail_once(self, client, login="alice"):
        wrong = derive_test_identity(login, "wrong-password", N)
        return drive_honest_session(client, wrong, login)

    def test_delays_double_and_cap(self, tmp_path):
        service, clock = make_service(tmp_path, lockout_threshold=64)
        client = TestClient(create_app(service))
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        clock.sleeps.clear()
        for _ in range(8):
            self.fail_once(client)
        assert clock.sleeps == [0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 5.0, 5.0]

    def test_hard_lock_after_threshold(self, setup):
        _service, clock, client = setup
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        for _ in range(5):
            assert self.fail_once(client).status_code == 401
        locked = client.post("/v1/session", json={"login": "alice"})
        assert locked.status_code == 429
        body = locked.json()
        assert body["error_code"] == "locked"
        assert 0 < body["retry_after_ms"] <= 900_000

    def test_lock_expires(self, setup):
        _service, clock, client = setup
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        for _ in range(5):
            self.fail_once(client)
        clock.advance(901)
        assert client.post("/v1/session", json={"login": "alice"}).status_code == 200

    def test_success_resets_lockout(self, setup):
        service, clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        for _ in range(3):
            self.fail_once(client)
        assert drive_honest_session(client, identity, "alice").json()["verdict"] == "accepted"
        clock.sleeps.clear()
        client.post("/v1/session", json={"login": "alice"})
        assert clock.sleeps == [0.1]  # back to the base delay

    def test_unknown_login_failures_lock_too(self, setup):
        _service, _clock, client = setup
        for _ in range(5):
            assert client.post("/v1/session", json={"login": "ghost"}).status_code == 401
        assert client.post("/v1/session", json={"login": "ghost"}).status_code == 429


class TestTokens:
    def test_token_ttl(self, setup):
        service, clock, client = setup
        payload, identity = register_payload()
        client.post("/v1/register", json=payload)
        token = drive_honest_session(client, identity, "alice").json()["token"]
        assert service.verify_token(token) == "alice"
        clock.advance(3601)
        assert service.verify_token(token) is None

    def test_unknown_token(self, setup):
        service, _clock, _client = setup
        assert service.verify_token("f" * 32) is None


class TestHooks:
    def test_pre_session_hook_can_refuse(self, tmp_path):
        service, _clock = make_service(tmp_path)

        def deny(login):
            raise ApiError(403, "captcha_required", "complete the challenge first")

        service.pre_session_hook = deny
        client = TestClient(create_app(service))
        payload, _ = register_payload()
        client.post("/v1/register", json=payload)
        reply = client.post("/v1/session", json={"login": "alice"})
        assert reply.status_code == 403
        assert reply.json()["error_code"] == "captcha_required"


def test_healthz(setup):
    _service, _clock, client = setup
    reply = TestClient(create_app(_service)).get("/v1/healthz")
    assert reply.status_code == 200 and reply.json() == {"status": "ok"}


def test_static_app_mount(tmp_path):
    static = tmp_path / "webroot"
    static.mkdir()
    (static / "index.html").write_text("<!doctype html><title>prover</title>")
    service, _clock = make_service(tmp_path, static_dir=str(static))
    client = TestClient(create_app(service))
    reply = client.get("/app/")
    assert reply.status_code == 200
    assert "prover" in reply.text
