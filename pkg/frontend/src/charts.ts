/** Small hand-rolled SVG charts: selection-frequency bars and paired-delta
 * boxplots. No canvas, so they render (and can be asserted on) in any DOM. */

import type { OCReport } from "./model.js";
import type { PairedDelta } from "./viewmodel.js";
import { groupByTarget } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const DESIGN_COLORS: Record<string, string> = {
  mtpi: "#8da0cb",
  mtpi2: "#fc8d62",
};

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

function text(x: number, y: number, content: string, size = 10): SVGTextElement {
  const el = svgElement("text", { x, y, "font-size": size, "text-anchor": "middle" });
  el.textContent = content;
  return el;
}

/** Grouped bars of per-dose selection frequency, one group per dose, one bar
 * per design; the true MTD dose is marked with a dashed line. */
export function selectionChart(reports: OCReport[], width = 420, height = 220): SVGSVGElement {
  const svg = svgElement("svg", {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
    role: "img",
    class: "selection-chart",
  });
  const first = reports[0];
  if (!first) return svg;
  const margin = { left: 36, right: 8, top: 12, bottom: 26 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const nDoses = first.selection_freq.length;
  const designs = reports.map((r) => r.design);
  const groupW = plotW / nDoses;
  const barW = (groupW * 0.8) / designs.length;

  for (const frac of [0, 0.5, 1]) {
    const y = margin.top + plotH * (1 - frac);
    svg.appendChild(
      svgElement("line", {
        x1: margin.left, y1: y, x2: width - margin.right, y2: y,
        stroke: "#ddd", "stroke-width": 1,
      }),
    );
    svg.appendChild(text(margin.left - 18, y + 3, frac.toFixed(1), 9));
  }
  reports.forEach((report, j) => {
    report.selection_freq.forEach((freq, i) => {
      const barH = plotH * freq;
      svg.appendChild(
        svgElement("rect", {
          x: margin.left + i * groupW + groupW * 0.1 + j * barW,
          y: margin.top + plotH - barH,
          width: barW,
          height: barH,
          fill: DESIGN_COLORS[report.design] ?? "#999",
          "data-design": report.design,
          "data-dose": i + 1,
          "data-freq": freq,
        }),
      );
    });
  });
  for (let i = 0; i < nDoses; i++) {
    svg.appendChild(
      text(margin.left + (i + 0.5) * groupW, height - 8, `d${i + 1}`, 10),
    );
  }
  if (first.true_mtd !== null) {
    const x = margin.left + (first.true_mtd - 0.5) * groupW;
    svg.appendChild(
      svgElement("line", {
        x1: x, y1: margin.top, x2: x, y2: margin.top + plotH,
        stroke: "#555", "stroke-dasharray": "4 3", class: "true-mtd-marker",
      }),
    );
  }
  return svg;
}

export interface BoxStats {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

/** Linear-interpolation quantile (matching the backend's summary stats). */
export function quantile(sorted: number[], q: number): number {
  if (sorted.length === 0) return NaN;
  const pos = q * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  const loVal = sorted[lo]!;
  const hiVal = sorted[hi]!;
  return loVal + (hiVal - loVal) * (pos - lo);
}

export function boxStats(values: number[]): BoxStats {
  const sorted = [...values].sort((a, b) => a - b);
  return {
    min: sorted[0]!,
    q1: quantile(sorted, 0.25),
    median: quantile(sorted, 0.5),
    q3: quantile(sorted, 0.75),
    max: sorted[sorted.length - 1]!,
  };
}

/** Boxplots of per-scenario deltas, one box per target p_T. */
export function deltaBoxplot(
  deltas: PairedDelta[],
  metric: "safetyDelta" | "reliabilityDelta",
  width = 420,
  height = 220,
): SVGSVGElement {
  const svg = svgElement("svg", {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
    role: "img",
    class: `delta-boxplot ${metric}`,
  });
  const groups = groupByTarget(deltas);
  if (groups.size === 0) return svg;
  const margin = { left: 40, right: 8, top: 12, bottom: 26 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const values = deltas.map((d) => d[metric]);
  const lo = Math.min(0, ...values);
  const hi = Math.max(0, ...values);
  const span = hi - lo || 1;
  const yOf = (v: number) => margin.top + plotH * (1 - (v - lo) / span);

  const zeroY = yOf(0);
  svg.appendChild(
    svgElement("line", {
      x1: margin.left, y1: zeroY, x2: width - margin.right, y2: zeroY,
      stroke: "#999", "stroke-dasharray": "3 3",
    }),
  );

  const slotW = plotW / groups.size;
  let slot = 0;
  for (const [target, group] of groups) {
    const stats = boxStats(group.map((d) => d[metric]));
    const cx = margin.left + (slot + 0.5) * slotW;
    const boxW = Math.min(48, slotW * 0.5);
    svg.appendChild(
      svgElement("line", {
        x1: cx, y1: yOf(stats.min), x2: cx, y2: yOf(stats.max),
        stroke: "#444", class: "whisker",
      }),
    );
    svg.appendChild(
      svgElement("rect", {
        x: cx - boxW / 2,
        y: yOf(stats.q3),
        width: boxW,
        height: Math.max(1, yOf(stats.q1) - yOf(stats.q3)),
        fill: "#d9e7f5",
        stroke: "#444",
        "data-pt": target,
        "data-median": stats.median,
      }),
    );
    svg.appendChild(
      svgElement("line", {
        x1: cx - boxW / 2, y1: yOf(stats.median), x2: cx + boxW / 2, y2: yOf(stats.median),
        stroke: "#1a1a1a", "stroke-width": 2, class: "median",
      }),
    );
    svg.appendChild(text(cx, height - 8, `p_T=${target}`, 10));
    slot += 1;
  }
  return svg;
}
