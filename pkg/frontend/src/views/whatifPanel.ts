/** What-if previews: the decision for every possible DLT count of the next
 * cohort, fetched from the service without mutating the trial. Selecting a
 * preview pre-fills the cohort entry form. */

import type { Client } from "../api.js";
import type { TrialView } from "../model.js";
import type { WhatIfPreview } from "../viewmodel.js";
import { decisionCardView, whatIfCounts } from "../viewmodel.js";

export interface WhatIfHandle {
  element: HTMLElement;
  previews: WhatIfPreview[];
}

export async function renderWhatIfPanel(
  container: HTMLElement,
  client: Client,
  trial: TrialView,
  onPick?: (dltCount: number) => void,
): Promise<WhatIfHandle> {
  const root = document.createElement("section");
  root.className = "whatif-panel";
  const heading = document.createElement("h3");
  heading.textContent = `If the next cohort of ${trial.params.cohort_size} at dose ${trial.state.current_dose} shows…`;
  root.appendChild(heading);

  const list = document.createElement("div");
  list.className = "whatif-list";
  root.appendChild(list);

  const previews: WhatIfPreview[] = [];
  for (const dltCount of whatIfCounts(trial.params.cohort_size)) {
    const resp = await client.whatIf(trial.id, dltCount, trial.params.cohort_size);
    previews.push({
      dltCount,
      action: resp.action,
      nextDose: resp.next_dose,
      status: resp.status,
      card: resp.card,
    });
  }

  for (const preview of previews) {
    const card = decisionCardView(preview.card);
    const button = document.createElement("button");
    button.type = "button";
    button.className = `whatif-preview decision-${preview.action}`;
    button.dataset.dlt = String(preview.dltCount);
    button.dataset.action = preview.action;
    const note =
      preview.status === "active"
        ? `next dose ${preview.nextDose}`
        : preview.status.replace("_", " ");
    button.textContent = `${preview.dltCount} DLT: ${preview.action} (${note}, BF ${card.bayesFactorText})`;
    if (card.weakEvidence) button.classList.add("weak-evidence");
    button.addEventListener("click", () => onPick?.(preview.dltCount));
    list.appendChild(button);
  }

  container.appendChild(root);
  return { element: root, previews };
}
