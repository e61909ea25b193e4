/** Thin typed client over the session service HTTP API.
 *
 * The UI performs no math of its own: everything it renders comes back
 * from these calls.
 */

import type {
  AlertDoc,
  AnswerResult,
  ConsensusDoc,
  ConstraintDoc,
  IntentDoc,
  InterventionDoc,
  PreferenceDoc,
  QuestionDoc,
  SessionSummary,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: unknown = null,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const doc = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(
        response.status,
        doc?.code ?? "unknown",
        doc?.message ?? `HTTP ${response.status}`,
        doc?.detail,
      );
    }
    return doc as T;
  }

  createSession(name: string, scenarioSet?: string): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", { name, scenario_set: scenarioSet });
  }

  getSession(sid: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sid}`);
  }

  advance(sid: string, to: string, actorId: string, agreedScenarioId?: number): Promise<{ phase: string }> {
    const body: Record<string, unknown> = { to, actor_id: actorId };
    if (agreedScenarioId !== undefined) {
      body.agreed_scenario_id = agreedScenarioId;
    }
    return this.request("POST", `/sessions/${sid}/advance`, body);
  }

  addParticipant(sid: string, displayName: string, role: "facilitator" | "stakeholder"): Promise<{ participant_id: string }> {
    return this.request("POST", `/sessions/${sid}/participants`, {
      display_name: displayName,
      role,
    });
  }

  getQuestion(sid: string, pid: string): Promise<QuestionDoc> {
    return this.request("GET", `/sessions/${sid}/participants/${pid}/question`);
  }

  answer(sid: string, pid: string, qid: string, winner: "A" | "B"): Promise<AnswerResult> {
    return this.request("POST", `/sessions/${sid}/participants/${pid}/question/${qid}/answer`, {
      winner,
    });
  }

  getPreference(sid: string, pid: string): Promise<PreferenceDoc> {
    return this.request("GET", `/sessions/${sid}/participants/${pid}/preference`);
  }

  getIntent(sid: string): Promise<IntentDoc> {
    return this.request("GET", `/sessions/${sid}/intent`);
  }

  getConsensus(sid: string, dimsTotal = 3, dimsRespected = 1): Promise<ConsensusDoc> {
    return this.request(
      "GET",
      `/sessions/${sid}/consensus?dims_total=${dimsTotal}&dims_respected=${dimsRespected}`,
    );
  }

  postConstraint(sid: string, constraint: ConstraintDoc): Promise<ConsensusDoc> {
    return this.request("POST", `/sessions/${sid}/constraints`, constraint);
  }

  getAlerts(sid: string): Promise<{ alerts: AlertDoc[] }> {
    return this.request("GET", `/sessions/${sid}/alerts`);
  }

  getIntervention(sid: string, pid: string): Promise<InterventionDoc> {
    return this.request("GET", `/sessions/${sid}/participants/${pid}/interventions`);
  }

  postTelemetry(source: string, series: Record<string, number>[]): Promise<{ status: string }> {
    return this.request("POST", "/telemetry", { source, series });
  }
}
