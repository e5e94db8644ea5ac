/** Cohort-by-cohort conduct: dose timeline, per-dose tallies, the current
 * decision card, stop/exclusion banners, the what-if panel, and finalize.
 * Every decision shown comes from a service response; the wizard holds no
 * dose-finding logic of its own. */

import { ApiError, type Client } from "../api.js";
import type { DecisionCard, MtdResult, TrialView } from "../model.js";
import { decisionCardView, mtdBanner, statusBanner, timeline } from "../viewmodel.js";
import { renderWhatIfPanel } from "./whatifPanel.js";

export interface WizardHandle {
  element: HTMLElement;
  /** Submit a cohort exactly as the entry form would. */
  enterCohort(dltCount: number): Promise<void>;
  finalize(): Promise<MtdResult>;
  refresh(): Promise<void>;
  trial(): TrialView;
}

function renderTallies(trial: TrialView): HTMLElement {
  const table = document.createElement("table");
  table.className = "dose-tallies";
  const head = document.createElement("tr");
  for (const label of ["dose", "DLTs x", "treated n", ""]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);
  trial.state.doses.forEach((dose, i) => {
    const num = i + 1;
    const tr = document.createElement("tr");
    tr.dataset.dose = String(num);
    if (num === trial.state.current_dose) tr.classList.add("current");
    if (trial.state.excluded.includes(num)) tr.classList.add("excluded");
    const cells = [
      String(num),
      String(dose.x),
      String(dose.n),
      trial.state.excluded.includes(num)
        ? "excluded"
        : num === trial.state.current_dose
          ? "← current"
          : "",
    ];
    for (const value of cells) {
      const td = document.createElement("td");
      td.textContent = value;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  return table;
}

function renderTimeline(trial: TrialView): HTMLElement {
  const list = document.createElement("ol");
  list.className = "timeline";
  for (const row of timeline(trial)) {
    const item = document.createElement("li");
    item.textContent =
      `cohort ${row.cohort}: dose ${row.dose}, ${row.dltCount}/${row.cohortN} DLTs ` +
      `(cumulative ${row.cumulative.x}/${row.cumulative.n})`;
    list.appendChild(item);
  }
  return list;
}

function renderCard(card: DecisionCard, action: string, nextDose: number): HTMLElement {
  const view = decisionCardView(card);
  const box = document.createElement("div");
  box.className = `decision-card decision-${card.decision}`;
  const title = document.createElement("h3");
  title.textContent = `${view.decisionLabel} → dose ${nextDose}`;
  title.dataset.action = action;
  box.appendChild(title);
  const meta = document.createElement("p");
  meta.textContent =
    `x=${card.x}, n=${card.n} · BF ${view.bayesFactorText}` +
    (view.weakEvidence ? " (weak evidence)" : "") +
    ` · Pr(p > p_T) = ${view.probOverTargetText}`;
  box.appendChild(meta);
  const bars = document.createElement("div");
  bars.className = "interval-bars";
  for (const bar of view.bars) {
    const row = document.createElement("div");
    row.className = `interval-bar action-${bar.action}`;
    const fill = document.createElement("span");
    fill.style.width = `${(bar.fraction * 100).toFixed(1)}%`;
    fill.title = `${bar.label}: ${(bar.fraction * 100).toFixed(1)}%`;
    row.appendChild(fill);
    const label = document.createElement("small");
    label.textContent = bar.label;
    row.appendChild(label);
    bars.appendChild(row);
  }
  box.appendChild(bars);
  return box;
}

function renderMtd(result: MtdResult): HTMLElement {
  const box = document.createElement("div");
  box.className = "mtd-result";
  const banner = document.createElement("h2");
  banner.className = "mtd-banner";
  banner.textContent = mtdBanner(result);
  box.appendChild(banner);
  const chart = document.createElement("ul");
  chart.className = "isotonic-means";
  result.transformed_means.forEach((mean, i) => {
    const item = document.createElement("li");
    item.textContent =
      mean === null ? `dose ${i + 1}: not a candidate` : `dose ${i + 1}: p* = ${mean.toFixed(4)}`;
    if (result.selected_dose === i + 1) item.classList.add("selected");
    chart.appendChild(item);
  });
  box.appendChild(chart);
  const rationale = document.createElement("ul");
  rationale.className = "rationale";
  for (const line of result.rationale) {
    const item = document.createElement("li");
    item.textContent = line;
    rationale.appendChild(item);
  }
  box.appendChild(rationale);
  return box;
}

export async function renderConductWizard(
  container: HTMLElement,
  client: Client,
  trialId: string,
): Promise<WizardHandle> {
  const root = document.createElement("section");
  root.className = "conduct-wizard";
  container.appendChild(root);

  let view = await client.getTrial(trialId);
  let lastResponse: { card: DecisionCard; action: string; next_dose: number } | null = null;

  const handle: WizardHandle = {
    element: root,
    trial: () => view,
    async enterCohort(dltCount: number) {
      const resp = await client.postCohort(
        trialId,
        dltCount,
        Math.min(view.params.cohort_size, view.params.max_n - view.state.total_enrolled),
        view.version,
      );
      view = resp.trial;
      lastResponse = resp;
      await draw();
    },
    async finalize() {
      const resp = await client.finalize(trialId, view.version);
      view = resp.trial;
      lastResponse = null;
      await draw();
      return resp.mtd_result;
    },
    async refresh() {
      view = await client.getTrial(trialId);
      lastResponse = null;
      await draw();
    },
  };

  async function draw(): Promise<void> {
    root.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent = `Trial ${view.id} — ${view.params.variant}, p_T=${view.params.p_T}`;
    root.appendChild(heading);

    const banner = statusBanner(view);
    if (banner) {
      const el = document.createElement("div");
      el.className = `banner banner-${banner.kind}`;
      el.textContent = banner.text;
      root.appendChild(el);
    }

    root.appendChild(renderTallies(view));
    root.appendChild(renderTimeline(view));

    if (lastResponse) {
      root.appendChild(renderCard(lastResponse.card, lastResponse.action, lastResponse.next_dose));
    }

    if (view.mtd_result) {
      root.appendChild(renderMtd(view.mtd_result));
      return; // terminal: no entry form on a finalized trial
    }

    if (view.state.status === "active") {
      const form = document.createElement("form");
      form.className = "cohort-entry";
      const label = document.createElement("label");
      label.textContent = `DLTs in the next cohort of ${view.params.cohort_size} at dose ${view.state.current_dose} `;
      const input = document.createElement("input");
      input.type = "number";
      input.name = "dlt_count";
      input.min = "0";
      input.max = String(view.params.cohort_size);
      input.value = "0";
      label.appendChild(input);
      form.appendChild(label);
      const submit = document.createElement("button");
      submit.type = "submit";
      submit.textContent = "Record cohort";
      form.appendChild(submit);
      const errorLine = document.createElement("p");
      errorLine.className = "entry-error";
      form.appendChild(errorLine);
      form.addEventListener("submit", (ev) => {
        ev.preventDefault();
        handle.enterCohort(Number(input.value)).catch((err) => {
          if (err instanceof ApiError && err.status === 409) {
            errorLine.textContent = `${err.detail} — refresh and retry`;
          } else {
            errorLine.textContent = String(err instanceof Error ? err.message : err);
          }
        });
      });
      root.appendChild(form);

      await renderWhatIfPanel(root, client, view, (dltCount) => {
        input.value = String(dltCount);
      });
    } else {
      const finalizeButton = document.createElement("button");
      finalizeButton.type = "button";
      finalizeButton.className = "finalize";
      finalizeButton.textContent = "Finalize: select the MTD";
      finalizeButton.addEventListener("click", () => void handle.finalize());
      root.appendChild(finalizeButton);
    }
  }

  await draw();
  return handle;
}
