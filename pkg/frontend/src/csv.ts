/** CSV rendering of simulation reports for the dashboard's export button.
 * Field order, precision, and the header convention line mirror the
 * service-side report writer exactly, so an export is byte-identical to the
 * CSV the backend tooling produces for the same report. */

import type { OCReport } from "./model.js";

export const TRUE_MTD_CONVENTION =
  "true MTD = dose with true toxicity closest to p_T among doses with " +
  "toxicity <= p_T + eps2; none when even the lowest dose exceeds that bound";

function csvField(value: string): string {
  if (/[",\n\r]/.test(value)) {
    return '"' + value.replace(/"/g, '""') + '"';
  }
  return value;
}

export function reportCsv(reports: OCReport[]): string {
  const nDoses = Math.max(...reports.map((r) => r.selection_freq.length));
  const header = ["scenario", "design", "p_T", "true_mtd", "n_trials", "seed"];
  for (let i = 1; i <= nDoses; i++) header.push(`sel_d${i}`);
  header.push("sel_none");
  for (let i = 1; i <= nDoses; i++) header.push(`alloc_d${i}`);
  header.push("reliability", "safety", "stop_tox_rate", "mean_sample_size");

  const lines = [`# ${TRUE_MTD_CONVENTION}`, header.map(csvField).join(",")];
  for (const r of reports) {
    const row = [
      r.scenario,
      r.design,
      r.p_T.toFixed(6),
      r.true_mtd === null ? "" : String(r.true_mtd),
      String(r.n_trials),
      String(r.seed),
    ];
    row.push(...r.selection_freq.map((v) => v.toFixed(6)));
    for (let i = r.selection_freq.length; i < nDoses; i++) row.push("");
    row.push(r.none_rate.toFixed(6));
    row.push(...r.allocation.map((v) => v.toFixed(6)));
    for (let i = r.allocation.length; i < nDoses; i++) row.push("");
    row.push(
      r.reliability.toFixed(6),
      r.safety.toFixed(6),
      r.stop_tox_rate.toFixed(6),
      r.mean_sample_size.toFixed(6),
    );
    lines.push(row.map(csvField).join(","));
  }
  return lines.join("\n") + "\n";
}
