/** App shell: hash routing between design setup, the table explorer, the
 * conduct wizard, and the simulation dashboard. The client is stateless —
 * reloading any route rebuilds the view from GET responses alone. */

import { ApiError, Client } from "./api.js";
import { renderConductWizard } from "./views/conductWizard.js";
import { renderDesignForm } from "./views/designForm.js";
import { renderOcDashboard } from "./views/ocDashboard.js";
import { renderTableExplorer } from "./views/tableExplorer.js";

const client = new Client(
  (window as { MTPI2_API_BASE?: string }).MTPI2_API_BASE ?? "",
);

function appRoot(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) throw new Error("missing #app container");
  return el;
}

function showError(root: HTMLElement, err: unknown): void {
  const box = document.createElement("div");
  box.className = "banner banner-danger";
  box.textContent = err instanceof ApiError ? `${err.status}: ${err.detail}` : String(err);
  root.appendChild(box);
}

async function routeDesign(root: HTMLElement): Promise<void> {
  const intro = document.createElement("h2");
  intro.textContent = "Set up a dose-finding trial";
  root.appendChild(intro);
  renderDesignForm(root, (values) => {
    void (async () => {
      try {
        const created = await client.createTrial(
          {
            p_T: values.p_T,
            eps1: values.eps1,
            eps2: values.eps2,
            xi: values.xi,
            variant: values.variant as "mtpi" | "mtpi2",
            max_n: values.max_n,
            cohort_size: values.cohort_size,
            start_dose: values.start_dose,
          },
          values.num_doses,
        );
        window.location.hash = `#/trial/${created.id}`;
      } catch (err) {
        showError(root, err);
      }
    })();
  });
  const explore = document.createElement("p");
  const link = document.createElement("a");
  link.href = "#/table?p_T=0.3&max_n=12";
  link.textContent = "…or explore decision tables without a trial";
  explore.appendChild(link);
  root.appendChild(explore);
}

async function routeTable(root: HTMLElement, query: URLSearchParams): Promise<void> {
  const response = await client.designTable({
    p_T: Number(query.get("p_T") ?? 0.3),
    eps1: Number(query.get("eps1") ?? 0.05),
    eps2: Number(query.get("eps2") ?? 0.05),
    xi: Number(query.get("xi") ?? 0.95),
    max_n: Number(query.get("max_n") ?? 12),
    variant: "both",
  });
  renderTableExplorer(root, response.designs, "mtpi2");
}

async function routeTrial(root: HTMLElement, trialId: string): Promise<void> {
  await renderConductWizard(root, client, trialId);
}

async function routeSimulation(root: HTMLElement, jobId: string): Promise<void> {
  const job = await client.waitForSimulation(jobId);
  renderOcDashboard(root, job);
}

export async function route(): Promise<void> {
  const root = appRoot();
  root.textContent = "";
  const hash = window.location.hash || "#/";
  const [path, queryText] = hash.slice(1).split("?");
  const query = new URLSearchParams(queryText ?? "");
  const parts = (path ?? "/").split("/").filter(Boolean);
  try {
    if (parts.length === 0) await routeDesign(root);
    else if (parts[0] === "table") await routeTable(root, query);
    else if (parts[0] === "trial" && parts[1]) await routeTrial(root, parts[1]);
    else if (parts[0] === "simulations" && parts[1]) await routeSimulation(root, parts[1]);
    else {
      root.textContent = "Unknown route";
    }
  } catch (err) {
    showError(root, err);
  }
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
