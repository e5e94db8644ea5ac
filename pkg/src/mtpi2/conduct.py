"""Live-trial state machine: dose transitions, stopping, and MTD selection.

TrialState is an immutable value; every transition returns a new state, so
replaying the event log always reproduces the final state exactly.  The
safety/stopping threshold xi is shared between per-dose exclusion and the
dose-1 trial-termination rule, and neither is applied to a dose until at
least three patients have been evaluated there (relevant for cohorts of
size one or two).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import decision_cell
from .partition import (
    ACTION_DEESCALATE,
    ACTION_ESCALATE,
    ACTION_STAY,
    ACTION_UNACCEPTABLE,
    DesignParams,
)
from .posterior import DoseData, posterior_mean, posterior_variance, prob_over_target

STATUS_ACTIVE = "active"
STATUS_STOPPED_TOXICITY = "stopped_toxicity"
STATUS_COMPLETED = "completed"

# The stopping/exclusion rule is suppressed at a dose until this many
# patients have been evaluated there.
SAFETY_MIN_N = 3


class TrialError(Exception):
    """Invalid transition requested on a trial state."""


@dataclass(frozen=True)
class CohortEvent:
    """One enrolled cohort: where it was treated and what was observed."""

    dose: int
    dlt_count: int
    cohort_n: int

    def to_json(self) -> dict:
        return {"dose": self.dose, "dlt_count": self.dlt_count, "cohort_n": self.cohort_n}


@dataclass(frozen=True)
class TrialState:
    params: DesignParams
    num_doses: int
    doses: tuple[DoseData, ...]  # index 0 is dose 1
    current_dose: int  # 1-based
    excluded: frozenset[int]
    status: str
    event_log: tuple[CohortEvent, ...]

    @property
    def total_enrolled(self) -> int:
        return sum(d.n for d in self.doses)

    def dose_data(self, dose: int) -> DoseData:
        return self.doses[dose - 1]

    def to_json(self) -> dict:
        return {
            "num_doses": self.num_doses,
            "doses": [{"x": d.x, "n": d.n} for d in self.doses],
            "current_dose": self.current_dose,
            "excluded": sorted(self.excluded),
            "status": self.status,
            "total_enrolled": self.total_enrolled,
            "event_log": [e.to_json() for e in self.event_log],
        }


@dataclass(frozen=True)
class DoseDecision:
    """Outcome of one dose-assignment step."""

    action: str
    dose: int  # dose for the next cohort (current dose if the trial stopped)
    state: TrialState


@dataclass(frozen=True)
class MtdResult:
    selected_dose: int | None
    transformed_means: tuple[float | None, ...]  # per dose; None if not a candidate
    rationale: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "selected_dose": self.selected_dose,
            "transformed_means": list(self.transformed_means),
            "rationale": list(self.rationale),
        }


def new_trial(params: DesignParams, num_doses: int) -> TrialState:
    if num_doses < 1:
        raise ValueError("num_doses must be >= 1")
    if params.start_dose > num_doses:
        raise ValueError(f"start_dose {params.start_dose} exceeds num_doses {num_doses}")
    return TrialState(
        params=params,
        num_doses=num_doses,
        doses=tuple(DoseData(0, 0) for _ in range(num_doses)),
        current_dose=params.start_dose,
        excluded=frozenset(),
        status=STATUS_ACTIVE,
        event_log=(),
    )


def record_cohort(state: TrialState, dlt_count: int, cohort_n: int) -> TrialState:
    """Add one cohort's outcomes at the current dose."""
    if state.status != STATUS_ACTIVE:
        raise TrialError(f"trial is {state.status}; no further cohorts can be recorded")
    if cohort_n < 1:
        raise TrialError("cohort_n must be >= 1")
    if not 0 <= dlt_count <= cohort_n:
        raise TrialError(f"dlt_count {dlt_count} outside [0, {cohort_n}]")
    if state.total_enrolled + cohort_n > state.params.max_n:
        raise TrialError(
            f"enrolling {cohort_n} would exceed max_n={state.params.max_n} "
            f"(already enrolled {state.total_enrolled})"
        )
    idx = state.current_dose - 1
    old = state.doses[idx]
    doses = list(state.doses)
    doses[idx] = DoseData(old.x + dlt_count, old.n + cohort_n)
    event = CohortEvent(state.current_dose, dlt_count, cohort_n)
    return replace(state, doses=tuple(doses), event_log=state.event_log + (event,))


def _gated_decision(state: TrialState, dose: int) -> str:
    """Decision at a dose, with U suppressed below the three-patient gate."""
    d = state.dose_data(dose)
    cell = decision_cell(d, state.params)
    if cell.decision == ACTION_UNACCEPTABLE and d.n < SAFETY_MIN_N:
        return cell.base_action
    return cell.decision


def next_dose(state: TrialState, params: DesignParams | None = None) -> DoseDecision:
    """Apply the optimal rule at the current dose and move (or stop).

    E at the top dose, D at dose 1, and E into an excluded dose all clamp
    to staying.  U excludes the current and all higher doses, then moves
    down -- or stops the trial when it fires at dose 1.
    """
    if params is not None and params != state.params:
        state = replace(state, params=params)
    if state.status != STATUS_ACTIVE:
        raise TrialError(f"trial is {state.status}")
    cur = state.current_dose
    if state.dose_data(cur).n < 1:
        raise TrialError(f"dose {cur} has no evaluated patients yet")

    action = _gated_decision(state, cur)
    if action == ACTION_UNACCEPTABLE:
        excluded = state.excluded | set(range(cur, state.num_doses + 1))
        if cur == 1:
            stopped = replace(state, excluded=frozenset(excluded), status=STATUS_STOPPED_TOXICITY)
            return DoseDecision(action, cur, stopped)
        return DoseDecision(action, cur - 1, replace(state, excluded=frozenset(excluded), current_dose=cur - 1))
    if action == ACTION_ESCALATE:
        target = cur + 1
        if target > state.num_doses or target in state.excluded:
            target = cur
    elif action == ACTION_DEESCALATE:
        target = max(1, cur - 1)
    else:
        target = cur
    return DoseDecision(action, target, replace(state, current_dose=target))


def check_stop(state: TrialState, params: DesignParams | None = None) -> str:
    """Status after the stopping rules: dose-1 toxicity, then max sample size."""
    p = params or state.params
    if state.status != STATUS_ACTIVE:
        return state.status
    d1 = state.dose_data(1)
    if d1.n >= SAFETY_MIN_N and prob_over_target(d1, p.p_t) > p.xi:
        return STATUS_STOPPED_TOXICITY
    if state.total_enrolled >= p.max_n:
        return STATUS_COMPLETED
    return STATUS_ACTIVE


def step(state: TrialState, dlt_count: int, cohort_n: int) -> DoseDecision:
    """record_cohort + next_dose + check_stop, the per-cohort conduct cycle."""
    after = record_cohort(state, dlt_count, cohort_n)
    decision = next_dose(after)
    status = check_stop(decision.state)
    if status != decision.state.status:
        decision = replace(decision, state=replace(decision.state, status=status))
    return decision


def replay(params: DesignParams, num_doses: int, events: list[CohortEvent]) -> TrialState:
    """Rebuild the final state by re-running every logged cohort."""
    state = new_trial(params, num_doses)
    for ev in events:
        if ev.dose != state.current_dose:
            raise TrialError(
                f"event log corrupt: cohort recorded at dose {ev.dose}, "
                f"state expects dose {state.current_dose}"
            )
        state = step(state, ev.dlt_count, ev.cohort_n).state
    return state


def pava(values: list[float], weights: list[float]) -> list[float]:
    """Weighted least-squares non-decreasing fit (pool adjacent violators).

    Each output block carries the weighted mean of the inputs it pooled.
    """
    if len(values) != len(weights):
        raise ValueError("values and weights must have equal length")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    blocks: list[tuple[float, float, int]] = []  # (weighted mean, total weight, span)
    for v, w in zip(values, weights):
        mean, weight, span = float(v), float(w), 1
        while blocks and blocks[-1][0] >= mean:
            pm, pw, pc = blocks.pop()
            mean = (pm * pw + mean * weight) / (pw + weight)
            weight += pw
            span += pc
        blocks.append((mean, weight, span))
    out: list[float] = []
    for mean, _, span in blocks:
        out.extend([mean] * span)
    return out


def select_mtd(state: TrialState, params: DesignParams | None = None) -> MtdResult:
    """End-of-trial MTD: isotonic-transformed posterior means, closest to p_T.

    Candidates are doses with data that pass the safety screen
    Pr(p > p_T) < xi.  Ties on |p* - p_T| resolve to the highest tied dose
    when its transformed mean is below target, the lowest when above.
    """
    p = params or state.params
    if state.status == STATUS_ACTIVE:
        raise TrialError("MTD selection requires a finished trial")
    rationale: list[str] = []
    candidates = []
    for dose in range(1, state.num_doses + 1):
        d = state.dose_data(dose)
        if d.n == 0:
            continue
        over = prob_over_target(d, p.p_t)
        if over < p.xi:
            candidates.append(dose)
        else:
            rationale.append(f"dose {dose} screened out: Pr(p > p_T) = {over:.4f} >= xi")
    means_by_dose: list[float | None] = [None] * state.num_doses
    if not candidates:
        rationale.append("no dose passes the safety screen; no MTD selected")
        return MtdResult(None, tuple(means_by_dose), tuple(rationale))

    means = [posterior_mean(state.dose_data(dose)) for dose in candidates]
    weights = [1.0 / posterior_variance(state.dose_data(dose)) for dose in candidates]
    fitted = pava(means, weights)
    for dose, value in zip(candidates, fitted):
        means_by_dose[dose - 1] = value

    diffs = [abs(v - p.p_t) for v in fitted]
    best = min(diffs)
    tied = [dose for dose, diff in zip(candidates, diffs) if diff <= best + 1e-12]
    below = [dose for dose in tied if means_by_dose[dose - 1] <= p.p_t]
    if below:
        selected = max(below)
        if len(tied) > 1:
            rationale.append(f"tie among doses {tied}: transformed mean <= p_T, chose highest")
    else:
        selected = min(tied)
        if len(tied) > 1:
            rationale.append(f"tie among doses {tied}: transformed mean > p_T, chose lowest")
    rationale.append(
        f"selected dose {selected} with |p* - p_T| = {best:.4f} "
        f"(p* = {means_by_dose[selected - 1]:.4f})"
    )
    return MtdResult(selected, tuple(means_by_dose), tuple(rationale))
