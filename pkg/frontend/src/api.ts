// Thin typed client over the corekit service endpoints.

import type { SessionDescriptor, StateDocument, StatsReport, TurnResponse } from "./types";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail = typeof body.detail === "string" ? body.detail : response.statusText;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export function createSession(userId: string): Promise<SessionDescriptor> {
  return request("/sessions", {
    method: "POST",
    body: JSON.stringify({ user_id: userId }),
  });
}

export function postTurn(sessionId: string, instruction: string): Promise<TurnResponse> {
  return request(`/sessions/${sessionId}/turns`, {
    method: "POST",
    body: JSON.stringify({ instruction }),
  });
}

export function getState(sessionId: string): Promise<StateDocument> {
  return request(`/sessions/${sessionId}/state`);
}

export function getStats(sessionId: string): Promise<{ rows: StateDocument["stats"]["rows"] }> {
  return request(`/sessions/${sessionId}/stats`);
}

export function reactivateConcept(sessionId: string, conceptId: string): Promise<StateDocument> {
  return request(`/sessions/${sessionId}/reactivate/${conceptId}`, { method: "POST" });
}

export function getOperators(): Promise<{ operators: unknown[] }> {
  return request("/operators");
}

export function getReplayDemoStats(): Promise<StatsReport> {
  return request("/ui/replay_stats.json");
}
