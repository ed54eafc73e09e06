/** Thin typed client over the service's JSON API. */

import type {
  ApiErrorBody,
  CreateRunRequest,
  Pose,
  Preview,
  RunState,
  SourceInfo,
  Status,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = "/api/v1") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let kind = "HttpError";
      let message = `${response.status} ${response.statusText}`;
      try {
        const doc = (await response.json()) as ApiErrorBody & { detail?: unknown };
        if (doc.error) {
          kind = doc.error;
          message = doc.message;
        } else if (doc.detail) {
          message = JSON.stringify(doc.detail);
        }
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, kind, message);
    }
    return (await response.json()) as T;
  }

  status(): Promise<Status> {
    return this.request("GET", "/status");
  }

  jog(axis: "theta" | "phi" | "rail", delta: number): Promise<Pose> {
    return this.request("POST", "/jog", { axis, delta });
  }

  home(): Promise<Pose> {
    return this.request("POST", "/home");
  }

  sources(): Promise<SourceInfo[]> {
    return this.request("GET", "/sources");
  }

  createRun(body: CreateRunRequest): Promise<RunState> {
    return this.request("POST", "/runs", body);
  }

  runs(): Promise<RunState[]> {
    return this.request("GET", "/runs");
  }

  run(runId: string): Promise<RunState> {
    return this.request("GET", `/runs/${encodeURIComponent(runId)}`);
  }

  start(runId: string): Promise<RunState> {
    return this.request("POST", `/runs/${encodeURIComponent(runId)}/start`);
  }

  pause(runId: string): Promise<RunState> {
    return this.request("POST", `/runs/${encodeURIComponent(runId)}/pause`);
  }

  abort(runId: string): Promise<RunState> {
    return this.request("POST", `/runs/${encodeURIComponent(runId)}/abort`);
  }

  preview(runId: string, phi?: number): Promise<Preview> {
    const query = phi === undefined ? "" : `?phi=${phi}`;
    return this.request("GET", `/runs/${encodeURIComponent(runId)}/preview${query}`);
  }

  archiveUrl(runId: string): string {
    return `${this.base}/runs/${encodeURIComponent(runId)}/archive`;
  }
}
