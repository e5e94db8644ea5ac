/** Types mirroring the dose-finding service's JSON schema (docs/api.md). */

export type DecisionCode = "E" | "S" | "D" | "U";

export interface DesignParams {
  p_T: number;
  eps1: number;
  eps2: number;
  xi: number;
  variant: "mtpi" | "mtpi2";
  leftover_policy: "exclude" | "include";
  max_n: number;
  cohort_size: number;
  start_dose: number;
}

export interface IntervalInfo {
  lo: number;
  hi: number;
  tier: number;
  action: DecisionCode;
}

export interface IntervalProb extends IntervalInfo {
  prob: number;
}

export interface DecisionCard {
  design: string;
  p_T: number;
  eps1: number;
  eps2: number;
  xi: number;
  x: number;
  n: number;
  decision: DecisionCode;
  bayes_factor: number | null;
  prob_over_target: number;
  intervals: IntervalProb[];
}

export interface TableCell {
  x: number;
  n: number;
  decision: DecisionCode;
  bayes_factor: number | null;
  winning_tier: number;
  posterior_model_probs: number[];
}

export interface TableDoc {
  variant: string;
  p_T: number;
  eps1: number;
  eps2: number;
  xi: number;
  max_n: number;
  leftover_policy: string;
  partition: { intervals: IntervalInfo[]; delta: number };
  cells: TableCell[];
}

export interface TableResponse {
  designs: Record<string, TableDoc>;
}

export type TrialStatus = "active" | "stopped_toxicity" | "completed";

export interface TrialState {
  num_doses: number;
  doses: { x: number; n: number }[];
  current_dose: number;
  excluded: number[];
  status: TrialStatus;
  total_enrolled: number;
  event_log: { dose: number; dlt_count: number; cohort_n: number }[];
}

export interface MtdResult {
  selected_dose: number | null;
  transformed_means: (number | null)[];
  rationale: string[];
}

export interface TrialView {
  id: string;
  params: DesignParams;
  state: TrialState;
  version: number;
  created_at: string;
  updated_at: string;
  last_action: DecisionCode | null;
  mtd_result: MtdResult | null;
}

export interface CohortResponse {
  card: DecisionCard;
  action: DecisionCode;
  next_dose: number;
  status: TrialStatus;
  version: number;
  trial: TrialView;
}

export interface WhatIfResponse {
  card: DecisionCard;
  action: DecisionCode;
  next_dose: number;
  status: TrialStatus;
  version: number;
}

export interface OCReport {
  scenario: string;
  design: string;
  p_T: number;
  true_mtd: number | null;
  n_trials: number;
  seed: number;
  selection_freq: number[];
  none_rate: number;
  allocation: number[];
  reliability: number;
  safety: number;
  stop_tox_rate: number;
  mean_sample_size: number;
}

export interface SimulationJob {
  id: string;
  status: "queued" | "running" | "done" | "failed";
  report?: OCReport[];
  error?: string;
}

export interface ScenarioRecord {
  label: string;
  p_T: number;
  true_tox: number[];
  eps1?: number;
  eps2?: number;
  xi?: number;
  cohort_size?: number;
  max_n?: number;
}

/** Bayes factors this close to 1 are flagged as weak evidence in the UI. */
export const WEAK_EVIDENCE_BF = 1.05;
