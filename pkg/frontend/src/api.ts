// Thin typed client for the session service; the UI never computes
// anything the service can answer.

import type { ProgramInfo, SessionState } from "./model.js";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, (body as { detail?: string }).detail ?? resp.statusText);
  }
  return body as T;
}

export interface CreateSessionArgs {
  source_schema: object;
  target_schema: object;
  example: { input: object; output: object };
  options?: object;
}

export function createSession(base: string, args: CreateSessionArgs): Promise<SessionState> {
  return request(base, "/sessions", { method: "POST", body: JSON.stringify(args) });
}

export function getSession(base: string, id: string): Promise<SessionState> {
  return request(base, `/sessions/${id}`);
}

export function postAnswer(
  base: string,
  id: string,
  output: object
): Promise<SessionState> {
  return request(base, `/sessions/${id}/answer`, {
    method: "POST",
    body: JSON.stringify({ output }),
  });
}

export function getProgram(base: string, id: string): Promise<ProgramInfo> {
  return request(base, `/sessions/${id}/program`);
}

export function migrate(
  base: string,
  id: string,
  instance: object
): Promise<{ instance: Record<string, object[]> }> {
  return request(base, `/sessions/${id}/migrate`, {
    method: "POST",
    body: JSON.stringify({ instance }),
  });
}

export async function pollUntilSettled(
  base: string,
  id: string,
  intervalMs = 1000,
  deadlineMs = 120_000
): Promise<SessionState> {
  const t0 = Date.now();
  for (;;) {
    const state = await getSession(base, id);
    if (state.status !== "synthesizing") return state;
    if (Date.now() - t0 > deadlineMs) throw new ApiError(408, "session did not settle");
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
