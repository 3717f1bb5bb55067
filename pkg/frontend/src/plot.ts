// SVG rendering of the association-space plot model. Zones are shaded
// rects, committed associations draw as hollow (initial) and filled (final)
// circles joined by a segment, and the single live point pulses.

import type { PlotModel } from "./model.js";
import type { Scores } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const PLOT_SIZE = 440;
const PAD = 14;

function toX(vision: number): number {
  return PAD + ((vision + 1) / 2) * (PLOT_SIZE - 2 * PAD);
}

function toY(language: number): number {
  return PLOT_SIZE - PAD - ((language + 1) / 2) * (PLOT_SIZE - 2 * PAD);
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export function renderPlot(svg: SVGSVGElement, model: PlotModel): void {
  svg.replaceChildren();
  svg.setAttribute("viewBox", `0 0 ${PLOT_SIZE} ${PLOT_SIZE}`);

  for (const region of model.regions) {
    svg.appendChild(
      el("rect", {
        class: `zone zone-${region.zone}`,
        x: toX(region.x0),
        y: toY(region.y1),
        width: toX(region.x1) - toX(region.x0),
        height: toY(region.y0) - toY(region.y1),
      }),
    );
  }

  // Axes through the origin.
  svg.appendChild(
    el("line", { class: "axis", x1: toX(-1), y1: toY(0), x2: toX(1), y2: toY(0) }),
  );
  svg.appendChild(
    el("line", { class: "axis", x1: toX(0), y1: toY(-1), x2: toX(0), y2: toY(1) }),
  );
  const xLabel = el("text", { class: "axis-label", x: toX(1) - 4, y: toY(0) - 6, "text-anchor": "end" });
  xLabel.textContent = "vision";
  svg.appendChild(xLabel);
  const yLabel = el("text", { class: "axis-label", x: toX(0) + 6, y: toY(1) + 12 });
  yLabel.textContent = "language";
  svg.appendChild(yLabel);

  for (const marker of model.markers) {
    const group = el("g", { class: `marker category-${marker.category}` });
    if (marker.moved) {
      group.appendChild(
        el("line", {
          class: "shift",
          x1: toX(marker.initial.vision),
          y1: toY(marker.initial.language),
          x2: toX(marker.final.vision),
          y2: toY(marker.final.language),
        }),
      );
      group.appendChild(circle(marker.initial, "initial hollow"));
    }
    group.appendChild(circle(marker.final, marker.resolved ? "final filled" : "final filled unresolved"));
    const title = el("title", {});
    title.textContent = marker.stimulusId;
    group.appendChild(title);
    svg.appendChild(group);
  }

  if (model.live) {
    svg.appendChild(circle(model.live, "live"));
  }
}

function circle(scores: Scores, className: string): SVGCircleElement {
  return el("circle", {
    class: className,
    cx: toX(scores.vision),
    cy: toY(scores.language),
    r: 6,
  });
}
