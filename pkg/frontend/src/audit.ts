/** Payload-to-DOM audit: proves every drawn coordinate came from the API.
 *
 * Walks an <svg> produced by the board renderer and checks, for every
 * drawable element, that either it is declared chrome (`data-chrome`) or
 * it carries `data-xy` whose pairs (a) occur verbatim among the payload's
 * embedded coordinates and (b) map exactly onto the element's rendered
 * screen attributes through the recorded viewport transform. Any element
 * violating either rule is reported.
 */

import type { ConsensusDoc, IntentDoc, XY } from "./types.js";
import { fmt } from "./viewport.js";

export interface AuditViolation {
  element: string;
  reason: string;
}

export function collectPayloadXy(consensus: ConsensusDoc, intent?: IntentDoc): Set<string> {
  const seen = new Set<string>();
  const add = (xy: XY | undefined) => {
    if (xy) {
      seen.add(`${xy[0]},${xy[1]}`);
    }
  };
  const g = consensus.geometry;
  add(g.reference_point_xy);
  for (const group of g.groups) {
    add(group.aggregation_xy);
  }
  for (const seg of g.conflict_segments) {
    add(seg.start_xy);
    add(seg.end_xy);
  }
  for (const entry of g.compromise_paths) {
    for (const path of entry.paths) {
      add(path.via_xy);
      for (const seg of path.segments) {
        add(seg.start_xy);
        add(seg.end_xy);
      }
    }
  }
  for (const xy of g.candidate_region.vertices_xy) {
    add(xy);
  }
  if (consensus.social_choice) {
    add(consensus.social_choice.target_xy);
  }
  if (intent) {
    for (const group of intent.groups) {
      add(group.aggregation_xy);
      for (const member of group.members) {
        add(member.xy);
      }
    }
  }
  return seen;
}

export function auditBoardSvg(
  svg: SVGSVGElement,
  payloadXy: Set<string>,
): AuditViolation[] {
  const violations: AuditViolation[] = [];
  const viewport = svg.getAttribute("data-viewport");
  if (!viewport) {
    return [{ element: "svg", reason: "missing data-viewport transform record" }];
  }
  const [scale, cx, cy] = viewport.split(",").map(Number);
  const toScreenPair = (pair: string): [string, string] => {
    const [x, y] = pair.split(",").map(Number);
    return [fmt(cx + x * scale), fmt(cy - y * scale)];
  };

  const drawables = svg.querySelectorAll("circle, line, polygon, polyline, path, rect");
  drawables.forEach((node) => {
    const el = node as SVGElement;
    const tag = el.tagName.toLowerCase();
    const label = `${tag}.${el.getAttribute("class") ?? ""}`;
    if (el.getAttribute("data-chrome") === "1") {
      return;
    }
    const data = el.getAttribute("data-xy");
    if (!data) {
      violations.push({ element: label, reason: "drawable without data-xy or data-chrome" });
      return;
    }
    const pairs = data.split(";");
    for (const pair of pairs) {
      if (!payloadXy.has(pair)) {
        violations.push({ element: label, reason: `coordinate ${pair} not found in any payload` });
      }
    }
    const expected = pairs.map(toScreenPair);
    if (tag === "circle") {
      const [ex, ey] = expected[0];
      if (el.getAttribute("cx") !== ex || el.getAttribute("cy") !== ey) {
        violations.push({ element: label, reason: "rendered center differs from transformed payload xy" });
      }
    } else if (tag === "line") {
      const [[x1, y1], [x2, y2]] = expected;
      if (
        el.getAttribute("x1") !== x1 ||
        el.getAttribute("y1") !== y1 ||
        el.getAttribute("x2") !== x2 ||
        el.getAttribute("y2") !== y2
      ) {
        violations.push({ element: label, reason: "rendered endpoints differ from transformed payload xy" });
      }
    } else if (tag === "polygon" || tag === "polyline") {
      const points = expected.map(([x, y]) => `${x},${y}`).join(" ");
      if (el.getAttribute("points") !== points) {
        violations.push({ element: label, reason: "rendered points differ from transformed payload xy" });
      }
    }
  });
  return violations;
}
