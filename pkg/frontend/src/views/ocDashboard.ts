/** Simulation dashboard: per-scenario selection-frequency bars, paired
 * reliability/safety delta boxplots grouped by target, and a CSV export
 * that is byte-identical to the backend's report writer. */

import type { OCReport, SimulationJob } from "../model.js";
import { deltaBoxplot, selectionChart } from "../charts.js";
import { reportCsv } from "../csv.js";
import { pairedDeltas } from "../viewmodel.js";

export interface DashboardHandle {
  element: HTMLElement;
  exportCsv(): string;
}

export function renderOcDashboard(container: HTMLElement, job: SimulationJob): DashboardHandle {
  const root = document.createElement("section");
  root.className = "oc-dashboard";
  container.appendChild(root);

  if (job.status === "failed") {
    const panel = document.createElement("div");
    panel.className = "banner banner-danger";
    panel.textContent = `Simulation failed: ${job.error ?? "unknown error"}`;
    root.appendChild(panel);
    return { element: root, exportCsv: () => "" };
  }
  if (job.status !== "done" || !job.report) {
    const panel = document.createElement("p");
    panel.textContent = `Simulation ${job.id} is ${job.status}…`;
    root.appendChild(panel);
    return { element: root, exportCsv: () => "" };
  }

  const reports: OCReport[] = job.report;
  const scenarios = [...new Set(reports.map((r) => r.scenario))];
  const designs = [...new Set(reports.map((r) => r.design))];

  const grid = document.createElement("div");
  grid.className = "scenario-grid";
  for (const scenario of scenarios) {
    const panel = document.createElement("figure");
    panel.dataset.scenario = scenario;
    const caption = document.createElement("figcaption");
    const subset = reports.filter((r) => r.scenario === scenario);
    const reliability = subset
      .map((r) => `${r.design} reliability ${(r.reliability * 100).toFixed(1)}%`)
      .join(" · ");
    caption.textContent = `${scenario} — ${reliability}`;
    panel.appendChild(caption);
    panel.appendChild(selectionChart(subset));
    grid.appendChild(panel);
  }
  root.appendChild(grid);

  if (designs.length === 2) {
    const deltas = pairedDeltas(reports, designs[1]!, designs[0]!);
    const compareBlock = document.createElement("div");
    compareBlock.className = "paired-deltas";
    const title = document.createElement("h3");
    title.textContent = `${designs[1]} − ${designs[0]}, per scenario`;
    compareBlock.appendChild(title);
    compareBlock.appendChild(deltaBoxplot(deltas, "reliabilityDelta"));
    compareBlock.appendChild(deltaBoxplot(deltas, "safetyDelta"));
    root.appendChild(compareBlock);
  }

  const exportButton = document.createElement("button");
  exportButton.type = "button";
  exportButton.className = "export-csv";
  exportButton.textContent = "Export CSV";
  const handle: DashboardHandle = {
    element: root,
    exportCsv: () => reportCsv(reports),
  };
  exportButton.addEventListener("click", () => {
    const blob = new Blob([handle.exportCsv()], { type: "text/csv" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `oc_report_${job.id}.csv`;
    link.click();
    URL.revokeObjectURL(link.href);
  });
  root.appendChild(exportButton);
  return handle;
}
