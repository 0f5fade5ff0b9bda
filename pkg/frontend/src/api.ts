/**
 * Typed client for the workflow-memory session API.
 *
 * The UI never reimplements workflow logic; it only calls the
 * documented endpoints and renders what comes back.
 */

export interface MatchSummary {
  record_id: string;
  score: number;
  window_start: number;
  window_end: number;
}

export interface InstructionResponse {
  response: string;
  mode: string;
  suggestions: string[];
  matches: MatchSummary[];
}

export interface SaveResponse {
  record_id: string;
  duplicate: boolean;
}

export interface WorkflowStep {
  step_id: string;
  kind: "user-instruction" | "function-call";
  name: string;
  instruction: string;
  input: Record<string, string>;
  output: string;
  sub_steps: WorkflowStep[];
}

export interface WorkflowDocument {
  workflow_id: string;
  created_at: string;
  source: string;
  tags: string[];
  steps: WorkflowStep[];
}

export interface CrewTool {
  name: string;
  description: string;
}

export interface CrewAgent {
  role: string;
  description: string;
  tools: CrewTool[];
}

export interface CrewDescription {
  name: string;
  agents: CrewAgent[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export class SessionApi {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `request failed with HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) {
          detail = body.detail;
        }
      } catch {
        // keep the generic message when the body is not JSON
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  createSession(crewId: string): Promise<{ session_id: string }> {
    return this.post("/sessions", { crew_id: crewId });
  }

  sendInstruction(sessionId: string, text: string): Promise<InstructionResponse> {
    return this.post(`/sessions/${sessionId}/instructions`, { text });
  }

  saveWorkflow(sessionId: string): Promise<SaveResponse> {
    return this.post(`/sessions/${sessionId}/save`);
  }

  getWorkflow(sessionId: string): Promise<WorkflowDocument> {
    return this.request(`/sessions/${sessionId}/workflow`);
  }

  getCrew(crewId: string): Promise<CrewDescription> {
    return this.request(`/crews/${crewId}`);
  }
}
