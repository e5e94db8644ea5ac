/** Color-coded (x, n) decision grid with Bayes-factor tooltips and a
 * side-by-side diff toggle highlighting cells where the variants disagree. */

import type { TableDoc } from "../model.js";
import { tableGrid } from "../viewmodel.js";

export interface TableExplorerHandle {
  element: HTMLElement;
  /** Re-render with the diff overlay on or off. */
  setDiff(enabled: boolean): void;
}

function renderGrid(root: HTMLElement, doc: TableDoc, diffAgainst?: TableDoc): void {
  root.textContent = "";
  const table = document.createElement("table");
  table.className = "decision-grid";
  const head = document.createElement("tr");
  head.appendChild(document.createElement("th")).textContent = "x \\ n";
  for (let n = 1; n <= doc.max_n; n++) {
    const th = document.createElement("th");
    th.textContent = String(n);
    head.appendChild(th);
  }
  table.appendChild(head);

  tableGrid(doc, diffAgainst).forEach((row, x) => {
    const tr = document.createElement("tr");
    const label = document.createElement("th");
    label.textContent = String(x);
    tr.appendChild(label);
    for (const cell of row) {
      const td = document.createElement("td");
      if (cell === null) {
        td.className = "infeasible";
        td.textContent = "-";
      } else {
        td.className = `decision decision-${cell.decision}`;
        td.textContent = cell.decision;
        td.title = cell.tooltip;
        td.dataset.x = String(cell.x);
        td.dataset.n = String(cell.n);
        if (cell.bayesFactor !== null) td.dataset.bf = cell.bayesFactor.toFixed(2);
        if (cell.weakEvidence) td.classList.add("weak-evidence");
        if (cell.changed) {
          td.classList.add("changed");
          td.dataset.changed = `${cell.changed.from}->${cell.changed.to}`;
          td.title += ` — changed from ${cell.changed.from}`;
        }
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  root.appendChild(table);
}

export function renderTableExplorer(
  container: HTMLElement,
  docs: Record<string, TableDoc>,
  primaryVariant = "mtpi2",
): TableExplorerHandle {
  const root = document.createElement("section");
  root.className = "table-explorer";
  const primary = docs[primaryVariant];
  if (!primary) throw new Error(`no table for variant ${primaryVariant}`);
  const other = Object.entries(docs).find(([v]) => v !== primaryVariant)?.[1];

  const controls = document.createElement("div");
  const toggle = document.createElement("input");
  toggle.type = "checkbox";
  toggle.id = "diff-toggle";
  const toggleLabel = document.createElement("label");
  toggleLabel.htmlFor = "diff-toggle";
  toggleLabel.textContent = " highlight differences vs the other design";
  if (other) {
    controls.appendChild(toggle);
    controls.appendChild(toggleLabel);
  }
  root.appendChild(controls);

  const gridHost = document.createElement("div");
  root.appendChild(gridHost);
  renderGrid(gridHost, primary);

  const handle: TableExplorerHandle = {
    element: root,
    setDiff(enabled: boolean) {
      toggle.checked = enabled;
      renderGrid(gridHost, primary, enabled ? other : undefined);
    },
  };
  toggle.addEventListener("change", () => handle.setDiff(toggle.checked));
  container.appendChild(root);
  return handle;
}
