/** Pure view-model builders: everything the views display is derived here
 * from service responses, so it can be tested without a DOM or a server. */

import type {
  DecisionCard,
  DecisionCode,
  MtdResult,
  OCReport,
  TableCell,
  TableDoc,
  TrialView,
} from "./model.js";
import { WEAK_EVIDENCE_BF } from "./model.js";

// ---------------------------------------------------------------------------
// design form validation (client-side mirror; the server stays authoritative)
// ---------------------------------------------------------------------------

export interface DesignFormValues {
  p_T: number;
  eps1: number;
  eps2: number;
  xi: number;
  variant: string;
  max_n: number;
  cohort_size: number;
  num_doses: number;
  start_dose: number;
}

export function validateDesignForm(values: DesignFormValues): Map<string, string> {
  const errors = new Map<string, string>();
  if (!(values.p_T > 0 && values.p_T < 1)) errors.set("p_T", "target must be inside (0, 1)");
  if (!(values.eps1 > 0)) errors.set("eps1", "must be positive");
  if (!(values.eps2 > 0)) errors.set("eps2", "must be positive");
  if (values.p_T > 0 && values.eps1 > 0 && values.p_T - values.eps1 <= 0) {
    errors.set("eps1", "needs p_T - eps1 > 0");
  }
  if (values.p_T < 1 && values.eps2 > 0 && values.p_T + values.eps2 >= 1) {
    errors.set("eps2", "needs p_T + eps2 < 1");
  }
  if (!(values.xi > 0.5 && values.xi < 1)) errors.set("xi", "threshold must be in (0.5, 1)");
  if (values.variant !== "mtpi" && values.variant !== "mtpi2") {
    errors.set("variant", "unknown design");
  }
  if (!(Number.isInteger(values.max_n) && values.max_n >= 1)) {
    errors.set("max_n", "must be a positive integer");
  }
  if (!(Number.isInteger(values.cohort_size) && values.cohort_size >= 1)) {
    errors.set("cohort_size", "must be a positive integer");
  }
  if (!(Number.isInteger(values.num_doses) && values.num_doses >= 1)) {
    errors.set("num_doses", "must be a positive integer");
  }
  if (
    Number.isInteger(values.start_dose) &&
    Number.isInteger(values.num_doses) &&
    (values.start_dose < 1 || values.start_dose > values.num_doses)
  ) {
    errors.set("start_dose", "must be between 1 and the number of doses");
  }
  return errors;
}

// ---------------------------------------------------------------------------
// decision table explorer
// ---------------------------------------------------------------------------

export interface GridCell {
  x: number;
  n: number;
  decision: DecisionCode;
  bayesFactor: number | null;
  weakEvidence: boolean;
  tooltip: string;
  changed?: { from: DecisionCode; to: DecisionCode };
}

export function cellTooltip(cell: TableCell): string {
  const head = `x=${cell.x}, n=${cell.n}: ${cell.decision}`;
  if (cell.bayes_factor === null) return `${head} (dose unacceptable)`;
  const weak = cell.bayes_factor < WEAK_EVIDENCE_BF ? ", weak evidence" : "";
  return `${head} (BF ${cell.bayes_factor.toFixed(2)}${weak})`;
}

/** Row-major grid [x][n-1]; null marks infeasible x > n. */
export function tableGrid(doc: TableDoc, diffAgainst?: TableDoc): (GridCell | null)[][] {
  const byKey = new Map(doc.cells.map((c) => [`${c.x}:${c.n}`, c]));
  const otherByKey = diffAgainst
    ? new Map(diffAgainst.cells.map((c) => [`${c.x}:${c.n}`, c]))
    : null;
  const rows: (GridCell | null)[][] = [];
  for (let x = 0; x <= doc.max_n; x++) {
    const row: (GridCell | null)[] = [];
    for (let n = 1; n <= doc.max_n; n++) {
      const cell = byKey.get(`${x}:${n}`);
      if (!cell) {
        row.push(null);
        continue;
      }
      const grid: GridCell = {
        x,
        n,
        decision: cell.decision,
        bayesFactor: cell.bayes_factor,
        weakEvidence: cell.bayes_factor !== null && cell.bayes_factor < WEAK_EVIDENCE_BF,
        tooltip: cellTooltip(cell),
      };
      const other = otherByKey?.get(`${x}:${n}`);
      if (other && other.decision !== cell.decision) {
        grid.changed = { from: other.decision, to: cell.decision };
      }
      row.push(grid);
    }
    rows.push(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// decision cards and what-if previews
// ---------------------------------------------------------------------------

export interface CardView {
  decision: DecisionCode;
  decisionLabel: string;
  bayesFactorText: string;
  weakEvidence: boolean;
  probOverTargetText: string;
  bars: { label: string; action: DecisionCode; fraction: number }[];
}

const DECISION_LABELS: Record<DecisionCode, string> = {
  E: "Escalate",
  S: "Stay",
  D: "De-escalate",
  U: "De-escalate & exclude (unacceptable)",
};

export function decisionCardView(card: DecisionCard): CardView {
  return {
    decision: card.decision,
    decisionLabel: DECISION_LABELS[card.decision],
    bayesFactorText: card.bayes_factor === null ? "—" : card.bayes_factor.toFixed(2),
    weakEvidence: card.bayes_factor !== null && card.bayes_factor < WEAK_EVIDENCE_BF,
    probOverTargetText: card.prob_over_target.toFixed(4),
    bars: card.intervals.map((iv) => ({
      label: `(${iv.lo.toFixed(2)}, ${iv.hi.toFixed(2)})`,
      action: iv.action,
      fraction: iv.prob,
    })),
  };
}

export interface WhatIfPreview {
  dltCount: number;
  action: DecisionCode;
  nextDose: number;
  status: string;
  card: DecisionCard;
}

/** The DLT counts a what-if panel enumerates for the next cohort. */
export function whatIfCounts(cohortSize: number): number[] {
  return Array.from({ length: cohortSize + 1 }, (_, i) => i);
}

// ---------------------------------------------------------------------------
// trial timeline and banners
// ---------------------------------------------------------------------------

export interface TimelineRow {
  cohort: number;
  dose: number;
  dltCount: number;
  cohortN: number;
  cumulative: { x: number; n: number };
}

export function timeline(trial: TrialView): TimelineRow[] {
  const perDose = new Map<number, { x: number; n: number }>();
  return trial.state.event_log.map((ev, i) => {
    const tally = perDose.get(ev.dose) ?? { x: 0, n: 0 };
    const cumulative = { x: tally.x + ev.dlt_count, n: tally.n + ev.cohort_n };
    perDose.set(ev.dose, cumulative);
    return {
      cohort: i + 1,
      dose: ev.dose,
      dltCount: ev.dlt_count,
      cohortN: ev.cohort_n,
      cumulative,
    };
  });
}

export function statusBanner(trial: TrialView): { kind: string; text: string } | null {
  const { state } = trial;
  if (state.status === "stopped_toxicity") {
    return { kind: "danger", text: "Trial stopped for excessive toxicity at the lowest dose" };
  }
  if (state.status === "completed" && !trial.mtd_result) {
    return { kind: "info", text: "Maximum sample size reached — finalize to select the MTD" };
  }
  if (state.excluded.length > 0 && state.status === "active") {
    const doses = [...state.excluded].sort((a, b) => a - b).join(", ");
    return { kind: "warning", text: `Doses excluded as unacceptable: ${doses}` };
  }
  return null;
}

export function mtdBanner(result: MtdResult): string {
  return result.selected_dose === null ? "No MTD selected" : `MTD: dose ${result.selected_dose}`;
}

// ---------------------------------------------------------------------------
// simulation dashboard
// ---------------------------------------------------------------------------

export interface PairedDelta {
  scenario: string;
  p_T: number;
  reliabilityDelta: number;
  safetyDelta: number;
}

/** Per-scenario (designA - designB) deltas, for the paired boxplots. */
export function pairedDeltas(reports: OCReport[], designA: string, designB: string): PairedDelta[] {
  const byScenario = new Map<string, Partial<Record<string, OCReport>>>();
  for (const report of reports) {
    const entry = byScenario.get(report.scenario) ?? {};
    entry[report.design] = report;
    byScenario.set(report.scenario, entry);
  }
  const deltas: PairedDelta[] = [];
  for (const [scenario, pair] of byScenario) {
    const a = pair[designA];
    const b = pair[designB];
    if (!a || !b) continue;
    deltas.push({
      scenario,
      p_T: a.p_T,
      reliabilityDelta: a.reliability - b.reliability,
      safetyDelta: a.safety - b.safety,
    });
  }
  return deltas;
}

export function groupByTarget(deltas: PairedDelta[]): Map<number, PairedDelta[]> {
  const groups = new Map<number, PairedDelta[]>();
  for (const delta of [...deltas].sort((a, b) => a.p_T - b.p_T)) {
    const group = groups.get(delta.p_T) ?? [];
    group.push(delta);
    groups.set(delta.p_T, group);
  }
  return groups;
}
