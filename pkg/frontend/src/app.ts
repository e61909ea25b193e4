/** Page wiring: facilitator dashboard and participant view in one page.
 *
 * The server is the sole source of truth: state transitions render only
 * what the API returns (optimistic UI is deliberately absent), and the
 * dashboard polls intent, consensus, and alerts every two seconds.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import { renderBoard } from "./board.js";
import { QuestionFlow } from "./question.js";
import type { AlertDoc, ConsensusDoc, IntentDoc } from "./types.js";

const POLL_MS = 2000;

export class FacilitatorDashboard {
  consensus: ConsensusDoc | null = null;
  intent: IntentDoc | null = null;
  alert: AlertDoc | null = null;
  notice: string | null = null;
  selectedPath = 0;
  dimsRespected = 1;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private facilitatorId: string,
    private container: HTMLElement,
  ) {}

  start(): void {
    void this.poll();
    this.timer = setInterval(() => void this.poll(), POLL_MS);
  }

  stop(): void {
    if (this.timer) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async poll(): Promise<void> {
    try {
      this.consensus = await this.api.getConsensus(this.sessionId, 3, this.dimsRespected);
      this.intent = await this.api.getIntent(this.sessionId);
      const alerts = await this.api.getAlerts(this.sessionId);
      this.alert = alerts.alerts[0] ?? null;
    } catch (err) {
      this.notice = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  async applyConstraint(axis: "a" | "b" | "c", kind: "min" | "max", value: number): Promise<void> {
    try {
      this.consensus = await this.api.postConstraint(this.sessionId, { axis, kind, value });
      this.notice = null;
    } catch (err) {
      this.notice = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  async setDimsRespected(dims: number): Promise<void> {
    this.dimsRespected = dims;
    await this.poll();
  }

  async reconvene(): Promise<void> {
    try {
      await this.api.advance(this.sessionId, "Convening", this.facilitatorId);
      this.alert = null;
      this.notice = "session re-convened";
    } catch (err) {
      // a 409 here is a blocking notice, not a crash
      this.notice = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  render(): void {
    if (!this.consensus) {
      this.container.textContent = "waiting for consensus payload...";
      return;
    }
    renderBoard(
      this.container,
      {
        consensus: this.consensus,
        intent: this.intent ?? undefined,
        alert: this.alert,
        selectedPath: this.selectedPath,
        notice: this.notice,
      },
      {
        onConstraint: (axis, kind, value) => void this.applyConstraint(axis, kind, value),
        onDimsRespected: (dims) => void this.setDimsRespected(dims),
        onReconvene: () => void this.reconvene(),
        onSelectPath: (index) => {
          this.selectedPath = index;
          this.render();
        },
      },
    );
  }
}

export function mountApp(root: HTMLElement, baseUrl: string): void {
  const api = new ApiClient(baseUrl);
  root.textContent = "";

  const setup = document.createElement("div");
  setup.className = "setup";
  setup.innerHTML = `
    <h1>Consensus session</h1>
    <label>session id <input class="session-id" placeholder="s1"></label>
    <label>participant id <input class="participant-id" placeholder="p2"></label>
    <label>facilitator id <input class="facilitator-id" placeholder="p1"></label>
    <button class="open-participant">Answer questions</button>
    <button class="open-board">Facilitator board</button>
  `;
  const participantPane = document.createElement("div");
  participantPane.className = "participant-pane";
  const boardPane = document.createElement("div");
  boardPane.className = "board-pane";
  root.append(setup, participantPane, boardPane);

  const sessionInput = setup.querySelector(".session-id") as HTMLInputElement;
  const participantInput = setup.querySelector(".participant-id") as HTMLInputElement;
  const facilitatorInput = setup.querySelector(".facilitator-id") as HTMLInputElement;

  (setup.querySelector(".open-participant") as HTMLButtonElement).addEventListener("click", () => {
    const flow = new QuestionFlow(api, sessionInput.value, participantInput.value, participantPane);
    void flow.refresh();
  });
  (setup.querySelector(".open-board") as HTMLButtonElement).addEventListener("click", () => {
    const dashboard = new FacilitatorDashboard(
      api,
      sessionInput.value,
      facilitatorInput.value,
      boardPane,
    );
    dashboard.start();
  });
}
