/** Facilitator board: renders the consensus payload as an SVG ternary
 * board plus path list, constraint controls, positionality preview, and
 * the drift banner.
 *
 * Rendering discipline: every data-driven SVG element records the payload
 * coordinate pair it came from in `data-xy`, and its screen position is
 * that pair pushed through the shared viewport transform. Static chrome
 * (triangle frame, axis labels) is tagged `data-chrome`. The audit in
 * `audit.ts` enforces both rules, which is how we guarantee the UI never
 * recomputes simplex math on its own.
 */

import type { ConsensusDoc, IntentDoc, AlertDoc, XY } from "./types.js";
import { AXIS_LABELS, FRAME_XY, fmt, makeViewport, toScreen, Viewport } from "./viewport.js";

export const MAJORITY_COLOR = "#c0392b"; // red dots group
export const MINORITY_COLOR = "#2980b9"; // blue dots group
const REFERENCE_COLOR = "#27ae60";
const TARGET_COLOR = "#8e44ad";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface BoardCallbacks {
  onConstraint?(axis: "a" | "b" | "c", kind: "min" | "max", value: number): void;
  onDimsRespected?(dims: number): void;
  onReconvene?(): void;
  onSelectPath?(index: number): void;
}

export interface BoardState {
  consensus: ConsensusDoc;
  intent?: IntentDoc;
  alert?: AlertDoc | null;
  selectedPath?: number;
  notice?: string | null;
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function datum(el: SVGElement, xy: XY): void {
  el.setAttribute("data-xy", `${xy[0]},${xy[1]}`);
}

function chrome(el: SVGElement): void {
  el.setAttribute("data-chrome", "1");
}

function circleAt(vp: Viewport, xy: XY, r: number, fill: string): SVGCircleElement {
  const [sx, sy] = toScreen(vp, xy);
  const c = svgEl("circle");
  c.setAttribute("cx", fmt(sx));
  c.setAttribute("cy", fmt(sy));
  c.setAttribute("r", String(r));
  c.setAttribute("fill", fill);
  datum(c, xy);
  return c;
}

function lineBetween(vp: Viewport, a: XY, b: XY, stroke: string, width: number, dashed: boolean): SVGLineElement {
  const [x1, y1] = toScreen(vp, a);
  const [x2, y2] = toScreen(vp, b);
  const l = svgEl("line");
  l.setAttribute("x1", fmt(x1));
  l.setAttribute("y1", fmt(y1));
  l.setAttribute("x2", fmt(x2));
  l.setAttribute("y2", fmt(y2));
  l.setAttribute("stroke", stroke);
  l.setAttribute("stroke-width", String(width));
  if (dashed) {
    l.setAttribute("stroke-dasharray", "6,4");
  }
  l.setAttribute("data-xy", `${a[0]},${a[1]};${b[0]},${b[1]}`);
  return l;
}

export function renderBoardSvg(state: BoardState, size = 520): SVGSVGElement {
  const vp = makeViewport(size);
  const svg = svgEl("svg");
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("data-viewport", `${vp.scale},${vp.cx},${vp.cy}`);

  const geometry = state.consensus.geometry;

  // chrome: triangle frame + axis labels
  const frame = svgEl("polygon");
  frame.setAttribute(
    "points",
    FRAME_XY.map((xy) => toScreen(vp, xy).map(fmt).join(",")).join(" "),
  );
  frame.setAttribute("fill", "none");
  frame.setAttribute("stroke", "#222");
  frame.setAttribute("stroke-width", "1.5");
  chrome(frame);
  svg.appendChild(frame);
  const anchors = ["middle", "end", "start"];
  const offsets: XY[] = [
    [0, -8],
    [-4, 14],
    [4, 14],
  ];
  FRAME_XY.forEach((xy, i) => {
    const [sx, sy] = toScreen(vp, xy);
    const label = svgEl("text");
    label.setAttribute("x", fmt(sx + offsets[i][0]));
    label.setAttribute("y", fmt(sy + offsets[i][1]));
    label.setAttribute("text-anchor", anchors[i]);
    label.setAttribute("font-size", "12");
    label.textContent = AXIS_LABELS[i];
    chrome(label);
    svg.appendChild(label);
  });

  // narrowed candidate region (gray area)
  const region = geometry.candidate_region;
  if (region.vertices_xy.length >= 3) {
    const poly = svgEl("polygon");
    poly.setAttribute(
      "points",
      region.vertices_xy.map((xy) => toScreen(vp, xy).map(fmt).join(",")).join(" "),
    );
    poly.setAttribute("fill", "#9e9e9e");
    poly.setAttribute("fill-opacity", "0.45");
    poly.setAttribute("class", "candidate-region");
    poly.setAttribute("data-xy", region.vertices_xy.map((xy) => `${xy[0]},${xy[1]}`).join(";"));
    svg.appendChild(poly);
  }

  // conflict relationships: group point -> reference point
  for (const seg of geometry.conflict_segments) {
    const line = lineBetween(vp, seg.start_xy, seg.end_xy, "#333", 1.5, false);
    line.setAttribute("class", "conflict-segment");
    svg.appendChild(line);
  }

  // compromise paths for the first ordered group pair, selectable
  const pathsEntry = geometry.compromise_paths[0];
  if (pathsEntry) {
    pathsEntry.paths.forEach((path, index) => {
      const selected = index === (state.selectedPath ?? 0);
      for (const seg of path.segments) {
        const line = lineBetween(
          vp,
          seg.start_xy,
          seg.end_xy,
          selected ? "#e67e22" : "#95a5a6",
          selected ? 2.5 : 1.2,
          true,
        );
        line.setAttribute("class", `compromise-path path-${index}${selected ? " selected" : ""}`);
        svg.appendChild(line);
      }
      const via = circleAt(vp, path.via_xy, selected ? 4 : 2.5, selected ? "#e67e22" : "#95a5a6");
      via.setAttribute("class", `compromise-via path-${index}`);
      svg.appendChild(via);
    });
  }

  // individual member points, colored by group
  if (state.intent) {
    for (const group of state.intent.groups) {
      const color = group.is_majority ? MAJORITY_COLOR : MINORITY_COLOR;
      for (const member of group.members) {
        const dot = circleAt(vp, member.xy, 2.5, color);
        dot.setAttribute("fill-opacity", "0.55");
        dot.setAttribute("class", "member-point");
        svg.appendChild(dot);
      }
    }
  }

  // aggregation points
  for (const group of geometry.groups) {
    const color = group.is_majority ? MAJORITY_COLOR : MINORITY_COLOR;
    const dot = circleAt(vp, group.aggregation_xy, 7, color);
    dot.setAttribute("class", `group-point group-${group.group_id}`);
    svg.appendChild(dot);
  }

  // consensus reference point
  const ref = circleAt(vp, geometry.reference_point_xy, 5, REFERENCE_COLOR);
  ref.setAttribute("class", "reference-point");
  svg.appendChild(ref);

  // positionality proposal target
  if (state.consensus.social_choice) {
    const target = circleAt(vp, state.consensus.social_choice.target_xy, 5, TARGET_COLOR);
    target.setAttribute("class", "proposal-target");
    svg.appendChild(target);
  }

  return svg;
}

export function renderBoard(
  container: HTMLElement,
  state: BoardState,
  callbacks: BoardCallbacks = {},
): void {
  container.textContent = "";
  const geometry = state.consensus.geometry;

  if (state.alert) {
    const banner = document.createElement("div");
    banner.className = "alert-banner";
    banner.setAttribute("role", "alert");
    const text = document.createElement("span");
    text.textContent =
      `Generation mix drifted (L1 distance ${state.alert.distance.toFixed(2)}) from the agreed scenario. `;
    banner.appendChild(text);
    const button = document.createElement("button");
    button.className = "reconvene";
    button.textContent = "Re-convene";
    button.addEventListener("click", () => callbacks.onReconvene?.());
    banner.appendChild(button);
    container.appendChild(banner);
  }

  if (state.notice) {
    const notice = document.createElement("div");
    notice.className = "notice";
    notice.textContent = state.notice;
    container.appendChild(notice);
  }

  container.appendChild(renderBoardSvg(state));

  // path list, shortest first as served; shortest preselected
  const pathsEntry = geometry.compromise_paths[0];
  const list = document.createElement("ul");
  list.className = "path-list";
  if (pathsEntry) {
    pathsEntry.paths.forEach((path, index) => {
      const item = document.createElement("li");
      item.className = `path-item${index === (state.selectedPath ?? 0) ? " selected" : ""}`;
      item.textContent =
        `hold ${path.held_axes[0]} then ${path.held_axes[1]} ` +
        `(length ${path.total_length.toFixed(3)})`;
      item.addEventListener("click", () => callbacks.onSelectPath?.(index));
      list.appendChild(item);
    });
  }
  container.appendChild(list);

  const regionInfo = document.createElement("div");
  regionInfo.className = "region-info";
  regionInfo.textContent = `candidate region area ${geometry.candidate_region.area.toFixed(4)}; constraints applied: ${geometry.applied_constraints.length}`;
  container.appendChild(regionInfo);

  // constraint controls
  const controls = document.createElement("div");
  controls.className = "constraint-controls";
  const axisSelect = document.createElement("select");
  axisSelect.className = "constraint-axis";
  for (const axis of ["a", "b", "c"]) {
    const opt = document.createElement("option");
    opt.value = axis;
    opt.textContent = axis;
    axisSelect.appendChild(opt);
  }
  const kindSelect = document.createElement("select");
  kindSelect.className = "constraint-kind";
  for (const kind of ["min", "max"]) {
    const opt = document.createElement("option");
    opt.value = kind;
    opt.textContent = kind === "min" ? ">=" : "<=";
    kindSelect.appendChild(opt);
  }
  const valueInput = document.createElement("input");
  valueInput.className = "constraint-value";
  valueInput.type = "range";
  valueInput.min = "0";
  valueInput.max = "1";
  valueInput.step = "0.05";
  valueInput.value = "0.3";
  const applyButton = document.createElement("button");
  applyButton.className = "constraint-apply";
  applyButton.textContent = "Narrow";
  applyButton.addEventListener("click", () =>
    callbacks.onConstraint?.(
      axisSelect.value as "a" | "b" | "c",
      kindSelect.value as "min" | "max",
      Number(valueInput.value),
    ),
  );
  controls.append(axisSelect, kindSelect, valueInput, applyButton);
  container.appendChild(controls);

  // positionality preview control
  const dims = document.createElement("div");
  dims.className = "positionality-controls";
  const dimsLabel = document.createElement("label");
  dimsLabel.textContent = `minority-respected dimensions (of ${state.consensus.dims_total}): `;
  const dimsSelect = document.createElement("select");
  dimsSelect.className = "dims-respected";
  for (let k = 1; k <= state.consensus.dims_total; k += 1) {
    const opt = document.createElement("option");
    opt.value = String(k);
    opt.textContent = String(k);
    if (k === state.consensus.dims_minority_respected) {
      opt.selected = true;
    }
    dimsSelect.appendChild(opt);
  }
  dimsSelect.addEventListener("change", () =>
    callbacks.onDimsRespected?.(Number(dimsSelect.value)),
  );
  dimsLabel.appendChild(dimsSelect);
  dims.appendChild(dimsLabel);
  if (state.consensus.social_choice) {
    const choice = document.createElement("span");
    choice.className = "social-choice-summary";
    const t = state.consensus.social_choice.target_point;
    choice.textContent =
      ` proposal target (${t[0].toFixed(3)}, ${t[1].toFixed(3)}, ${t[2].toFixed(3)})` +
      ` -> scenario ${state.consensus.social_choice.chosen_scenario_id}`;
    dims.appendChild(choice);
  }
  container.appendChild(dims);
}
