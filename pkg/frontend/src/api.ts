// Thin fetch wrappers over the session service HTTP API.

import type { CreateSessionResponse, Frame, PostEventResponse, Snapshot } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service error ${status}: ${JSON.stringify(detail)}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiError(response.status, body && (body as { detail?: unknown }).detail);
  }
  return body as T;
}

export class SessionApi {
  constructor(public base: string) {}

  createSession(subjectId: string, config?: Record<string, unknown>): Promise<CreateSessionResponse> {
    return request(`${this.base}/sessions`, {
      method: "POST",
      body: JSON.stringify({ subject_id: subjectId, ...(config ? { config } : {}) }),
    });
  }

  postEvent(sessionId: string, event: Record<string, unknown>): Promise<PostEventResponse> {
    return request(`${this.base}/sessions/${sessionId}/events`, {
      method: "POST",
      body: JSON.stringify(event),
    });
  }

  postFrames(sessionId: string, frames: Frame[]): Promise<{ buffered: number }> {
    return request(`${this.base}/sessions/${sessionId}/frames`, {
      method: "POST",
      body: JSON.stringify({ frames }),
    });
  }

  getState(sessionId: string): Promise<Snapshot> {
    return request(`${this.base}/sessions/${sessionId}/state`);
  }

  streamUrl(sessionId: string, fromSeq: number): string {
    return `${this.base}/sessions/${sessionId}/stream?from=${fromSeq}`;
  }
}
