// Thin fetch client for the session service.  Server rejections (409, 422)
// become typed errors carrying whatever geometry the server sent back, so
// the view layer can show the violated constraint inline.

import type { BaselinePayload, RejectionBody, SessionState, SetGeometry } from "./types";

export class ServerRejection extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly set: SetGeometry | null,
  ) {
    super(message);
    this.name = "ServerRejection";
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: RejectionBody = { error: `HTTP ${response.status}` };
  try {
    body = (await response.json()) as RejectionBody;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ServerRejection(body.error, response.status, body.set ?? null);
}

export async function createSession(
  base: string,
  body: { case?: number; config?: unknown } = {},
): Promise<SessionState> {
  const response = await fetch(`${base}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  return parseOrThrow<SessionState>(response);
}

export async function getState(base: string, id: string): Promise<SessionState> {
  return parseOrThrow<SessionState>(await fetch(`${base}/sessions/${id}`));
}

export async function submitDecision(
  base: string,
  id: string,
  payload: { t: number; delta?: number; u?: number[] },
): Promise<SessionState> {
  const response = await fetch(`${base}/sessions/${id}/decision`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  return parseOrThrow<SessionState>(response);
}

export async function getBaselines(
  base: string,
  id: string,
): Promise<BaselinePayload> {
  return parseOrThrow<BaselinePayload>(
    await fetch(`${base}/sessions/${id}/baselines`),
  );
}
