// JSON client for the verifier endpoints.  Only public values are ever
// put on the wire: the login, graph/permutation hex, and round messages.

export class ServerError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
    readonly retryAfterMs?: number,
  ) {
    super(message);
  }
}

export interface SessionInfo {
  session_id: string;
  n: number;
  rounds_total: number;
}

export interface RespondReply {
  round?: string;
  next?: string;
  verdict?: string;
  token?: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = await response.json().catch(() => {
      throw new ServerError(response.status, "transport", "non-JSON reply");
    });
    if (!response.ok) {
      throw new ServerError(
        response.status,
        body.error_code ?? "unknown",
        body.message ?? "request failed",
        body.retry_after_ms,
      );
    }
    return body as T;
  }

  register(login: string, n: number, hashId: string, g1Hex: string, g2Hex: string): Promise<{ status: string }> {
    return this.post("/v1/register", { login, n, hash_id: hashId, g1: g1Hex, g2: g2Hex });
  }

  startSession(login: string): Promise<SessionInfo> {
    return this.post("/v1/session", { login });
  }

  async commit(sessionId: string, hHex: string): Promise<number> {
    const reply = await this.post<{ b: number }>(`/v1/session/${sessionId}/commit`, { h: hHex });
    return reply.b;
  }

  respond(sessionId: string, chiHex: string): Promise<RespondReply> {
    return this.post(`/v1/session/${sessionId}/respond`, { chi: chiHex });
  }
}
