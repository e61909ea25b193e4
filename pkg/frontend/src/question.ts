/** Participant question flow: fetch, render both choices, submit, repeat.
 *
 * Choice thumbnails place the scenario's payload-provided xy through the
 * shared viewport transform; value bars show the normalized triple as
 * widths. Input is disabled once the server reports convergence, and
 * because question ids are idempotent the flow can resume after a refresh
 * or network failure without duplicating answers.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import type { ChoiceDoc, PreferenceDoc, QuestionDoc } from "./types.js";
import { AXIS_LABELS, fmt, FRAME_XY, makeViewport, toScreen } from "./viewport.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function thumbnail(choice: ChoiceDoc, size = 110): SVGSVGElement {
  const vp = makeViewport(size);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  svg.setAttribute("data-viewport", `${vp.scale},${vp.cx},${vp.cy}`);
  const frame = document.createElementNS(SVG_NS, "polygon");
  frame.setAttribute(
    "points",
    FRAME_XY.map((xy) => toScreen(vp, xy).map(fmt).join(",")).join(" "),
  );
  frame.setAttribute("fill", "none");
  frame.setAttribute("stroke", "#555");
  frame.setAttribute("data-chrome", "1");
  svg.appendChild(frame);
  if (choice.point_xy) {
    const [sx, sy] = toScreen(vp, choice.point_xy);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", fmt(sx));
    dot.setAttribute("cy", fmt(sy));
    dot.setAttribute("r", "4");
    dot.setAttribute("fill", "#2a7f3f");
    dot.setAttribute("data-xy", `${choice.point_xy[0]},${choice.point_xy[1]}`);
    svg.appendChild(dot);
  }
  return svg;
}

function choiceCard(tag: "A" | "B", choice: ChoiceDoc, onPick: () => void, disabled: boolean): HTMLElement {
  const card = document.createElement("div");
  card.className = `choice choice-${tag.toLowerCase()}`;
  const title = document.createElement("h3");
  title.textContent = `Choice ${tag} — scenario ${choice.scenario_id}`;
  card.appendChild(title);

  const bars = document.createElement("div");
  bars.className = "value-bars";
  const normalized = choice.normalized ?? [0, 0, 0];
  AXIS_LABELS.forEach((label, i) => {
    const row = document.createElement("div");
    row.className = `bar bar-${label}`;
    const caption = document.createElement("span");
    caption.textContent = label;
    const track = document.createElement("div");
    track.className = "track";
    const fill = document.createElement("div");
    fill.className = "fill";
    fill.style.width = `${Math.round(normalized[i] * 100)}%`;
    fill.setAttribute("data-value", String(normalized[i]));
    track.appendChild(fill);
    row.append(caption, track);
    bars.appendChild(row);
  });
  card.appendChild(bars);
  card.appendChild(thumbnail(choice));

  const raw = document.createElement("p");
  raw.className = "raw-indices";
  raw.textContent =
    `circulation ${choice.raw.social.toFixed(3)}, renewables ${choice.raw.environmental.toFixed(3)}, ` +
    `cost/household ${Math.round(choice.raw.economic_cost)}`;
  card.appendChild(raw);

  const button = document.createElement("button");
  button.className = `pick pick-${tag.toLowerCase()}`;
  button.textContent = `Prefer ${tag}`;
  button.disabled = disabled;
  button.addEventListener("click", onPick);
  card.appendChild(button);
  return card;
}

export class QuestionFlow {
  question: QuestionDoc | null = null;
  preference: PreferenceDoc | null = null;
  error: string | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private participantId: string,
    private container: HTMLElement,
    private questionBudget = 30,
  ) {}

  async refresh(): Promise<void> {
    try {
      this.question = await this.api.getQuestion(this.sessionId, this.participantId);
      this.preference = await this.api.getPreference(this.sessionId, this.participantId);
      this.error = null;
    } catch (err) {
      this.error = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  async submit(winner: "A" | "B"): Promise<void> {
    if (!this.question || this.question.done || !this.question.question_id) {
      return;
    }
    try {
      await this.api.answer(this.sessionId, this.participantId, this.question.question_id, winner);
      this.error = null;
    } catch (err) {
      if (err instanceof ApiRequestError && err.code === "conflicting_answer") {
        this.error = "answer already recorded differently; refreshing";
      } else {
        this.error = err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      }
    }
    await this.refresh();
  }

  get finished(): boolean {
    if (!this.question) {
      return false;
    }
    return this.question.done || this.question.converged || this.question.asked_count >= this.questionBudget;
  }

  render(): void {
    this.container.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = `Participant ${this.participantId}`;
    this.container.appendChild(heading);

    if (this.error) {
      const err = document.createElement("div");
      err.className = "inline-error";
      err.textContent = this.error;
      const retry = document.createElement("button");
      retry.className = "retry";
      retry.textContent = "Retry";
      retry.addEventListener("click", () => void this.refresh());
      err.appendChild(retry);
      this.container.appendChild(err);
    }
    if (!this.question) {
      return;
    }

    const progress = document.createElement("p");
    progress.className = "progress";
    progress.textContent = `answered ${this.question.asked_count} of up to ${this.questionBudget}`;
    this.container.appendChild(progress);

    const done = this.finished;
    if (done) {
      const summary = document.createElement("div");
      summary.className = "converged-summary";
      summary.textContent = this.question.converged
        ? "Your preference estimate has converged — thank you!"
        : "Question budget reached — thank you!";
      this.container.appendChild(summary);
    } else if (this.question.choice_a && this.question.choice_b) {
      const pair = document.createElement("div");
      pair.className = "choice-pair";
      pair.appendChild(choiceCard("A", this.question.choice_a, () => void this.submit("A"), done));
      pair.appendChild(choiceCard("B", this.question.choice_b, () => void this.submit("B"), done));
      this.container.appendChild(pair);
    }

    if (this.preference) {
      const mini = document.createElement("div");
      mini.className = "preference-mini";
      const caption = document.createElement("p");
      const m = this.preference.map_estimate;
      caption.textContent =
        `current estimate (social, environmental, economic) = ` +
        `(${m[0].toFixed(3)}, ${m[1].toFixed(3)}, ${m[2].toFixed(3)})`;
      mini.appendChild(caption);
      const size = 130;
      const vp = makeViewport(size);
      const svg = document.createElementNS(SVG_NS, "svg");
      svg.setAttribute("width", String(size));
      svg.setAttribute("height", String(size));
      svg.setAttribute("class", "preference-plot");
      svg.setAttribute("data-viewport", `${vp.scale},${vp.cx},${vp.cy}`);
      const frame = document.createElementNS(SVG_NS, "polygon");
      frame.setAttribute(
        "points",
        FRAME_XY.map((xy) => toScreen(vp, xy).map(fmt).join(",")).join(" "),
      );
      frame.setAttribute("fill", "none");
      frame.setAttribute("stroke", "#555");
      frame.setAttribute("data-chrome", "1");
      svg.appendChild(frame);
      const [sx, sy] = toScreen(vp, this.preference.map_xy);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", fmt(sx));
      dot.setAttribute("cy", fmt(sy));
      dot.setAttribute("r", "5");
      dot.setAttribute("fill", "#8e44ad");
      dot.setAttribute("class", "map-dot");
      dot.setAttribute("data-xy", `${this.preference.map_xy[0]},${this.preference.map_xy[1]}`);
      svg.appendChild(dot);
      mini.appendChild(svg);
      this.container.appendChild(mini);
    }
  }
}
