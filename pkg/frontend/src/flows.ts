// Register/login flows: everything the page does apart from rendering.
// Key derivation runs here, in the browser; the password is consumed to
// derive the identity and is never part of any request.

import { ApiClient, ServerError } from "./api.js";
import { bytesToHex } from "./encoding.js";
import { serializeGraph, serializePermutation } from "./graphs.js";
import { deriveIdentity, Identity } from "./kdf.js";
import { proverCommit, proverRespond } from "./protocol.js";

export type RoundEvent =
  | { kind: "derived"; n: number }
  | { kind: "session"; roundsTotal: number }
  | { kind: "commit"; round: number }
  | { kind: "challenge"; round: number; b: number }
  | { kind: "response"; round: number }
  | { kind: "round_pass"; round: number };

export interface LoginResult {
  accepted: boolean;
  token?: string;
  roundsCompleted: number;
  errorCode?: string;
  message?: string;
}

export async function registerFlow(
  api: ApiClient,
  login: string,
  password: string,
  n: number,
  hashId = "sha256",
): Promise<{ status: string; identity: Identity }> {
  const identity = await deriveIdentity(login, password, n);
  const reply = await api.register(
    login,
    n,
    hashId,
    bytesToHex(serializeGraph(identity.g1)),
    bytesToHex(serializeGraph(identity.g2)),
  );
  return { status: reply.status, identity };
}

export async function loginFlow(
  api: ApiClient,
  login: string,
  password: string,
  onEvent: (event: RoundEvent) => void = () => {},
): Promise<LoginResult> {
  const session = await api.startSession(login);
  // the server's registered graph size wins; re-derive at that size
  const identity = await deriveIdentity(login, password, session.n);
  onEvent({ kind: "derived", n: session.n });
  onEvent({ kind: "session", roundsTotal: session.rounds_total });
  for (let round = 1; round <= session.rounds_total; round++) {
    const state = proverCommit(identity);
    onEvent({ kind: "commit", round });
    let b: number;
    try {
      b = await api.commit(session.session_id, bytesToHex(serializeGraph(state.h)));
    } catch (error) {
      return failureFrom(error, round - 1);
    }
    onEvent({ kind: "challenge", round, b });
    const chi = proverRespond(state, b, identity);
    onEvent({ kind: "response", round });
    let reply;
    try {
      reply = await api.respond(session.session_id, bytesToHex(serializePermutation(chi)));
    } catch (error) {
      return failureFrom(error, round - 1);
    }
    if (reply.verdict === "accepted") {
      return { accepted: true, token: reply.token, roundsCompleted: round };
    }
    onEvent({ kind: "round_pass", round });
  }
  return { accepted: false, roundsCompleted: 0, errorCode: "incomplete" };
}

function failureFrom(error: unknown, roundsCompleted: number): LoginResult {
  if (error instanceof ServerError) {
    return { accepted: false, roundsCompleted, errorCode: error.errorCode, message: error.message };
  }
  throw error;
}
