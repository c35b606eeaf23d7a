// Typed client for the simloop HTTP API. Every non-2xx response carries a
// {code, message, details} body, surfaced here as ApiError.

export interface HealthResponse {
  status: string;
  project_id: string;
  points: number;
  dim: number | null;
}

export interface InterestDoc {
  base_task: string;
  facets: string[];
  version: number;
}

export interface PromptDoc {
  text: string;
  interest_version: number;
  tag_count: number;
}

export interface ProfileDoc {
  point_id: string;
  tags: string[];
  free_text: string;
  prompt_version: number;
  provider_id: string;
  created_at: string;
}

export interface RoundDoc {
  round_no: number;
  prompt: PromptDoc;
  profiles: ProfileDoc[];
  feedback: string | null;
}

export type SimLabel = "similar" | "not_similar";
export type SessionStateName = "created" | "generated" | "accepted";

export interface PairLabelDoc {
  a: string;
  b: string;
  label: SimLabel;
  labeler: string;
}

export interface SessionView {
  session_id: string;
  state: SessionStateName;
  interest: InterestDoc;
  point_ids: string[];
  rounds: RoundDoc[];
  pair_labels: PairLabelDoc[];
  points: Record<string, string>;
}

export interface NeighborRow {
  rank: number;
  id: string;
  score: number;
  label: SimLabel | null;
}

export interface NeighborsResponse {
  point_id: string;
  k: number;
  threshold: number | null;
  neighbors: NeighborRow[];
}

export interface CalibrationStats {
  j: number;
  positives: number;
  negatives: number;
}

export interface ThresholdResponse {
  tau: number;
  provenance: string;
  calibration_stats?: CalibrationStats | null;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class SimloopClient {
  constructor(private base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("unreachable", `backend unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      let code = "internal";
      let message = response.statusText;
      let details: Record<string, unknown> = {};
      try {
        const doc = await response.json();
        code = doc.code ?? code;
        message = doc.message ?? message;
        details = doc.details ?? {};
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, message, response.status, details);
    }
    return (await response.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  createSession(pointIds: string[], interest: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { point_ids: pointIds, interest });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  generate(sessionId: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/generate`);
  }

  review(
    sessionId: string,
    action: "refine" | "accept",
    feedback = "",
    edit?: string,
    mode?: "add" | "replace",
  ): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/review`, {
      feedback,
      action,
      edit,
      mode,
    });
  }

  addLabel(sessionId: string, a: string, b: string, label: SimLabel): Promise<SessionView> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/labels`, {
      a,
      b,
      label,
    });
  }

  calibrate(sessionId: string): Promise<ThresholdResponse> {
    return this.request("POST", "/threshold/calibrate", { session_id: sessionId });
  }

  putThreshold(tau: number): Promise<ThresholdResponse> {
    return this.request("PUT", "/threshold", { tau });
  }

  neighbors(pointId: string, k: number): Promise<NeighborsResponse> {
    return this.request("GET", `/points/${encodeURIComponent(pointId)}/neighbors?k=${k}`);
  }
}
