"""Monte Carlo operating characteristics for interval dose-finding designs.

Each trial draws its DLT counts from a counter-based Philox stream keyed by
(seed, trial index), so results are reproducible and independent of how
trials are scheduled: running the same study serially or on a worker pool
produces byte-identical reports.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .conduct import STATUS_ACTIVE, STATUS_STOPPED_TOXICITY, new_trial, select_mtd, step
from .partition import VARIANT_MTPI, VARIANT_MTPI2, DesignParams

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Scenario:
    """A true toxicity curve plus the design inputs used to run it."""

    label: str
    p_t: float
    true_tox: tuple[float, ...]
    eps1: float = 0.05
    eps2: float = 0.05
    xi: float = 0.95
    cohort_size: int = 3
    max_n: int = 30

    def __post_init__(self) -> None:
        if not self.true_tox:
            raise ValueError(f"scenario {self.label!r}: empty true_tox")
        if any(not 0.0 <= p <= 1.0 for p in self.true_tox):
            raise ValueError(f"scenario {self.label!r}: toxicity outside [0, 1]")
        if any(b < a for a, b in zip(self.true_tox, self.true_tox[1:])):
            warnings.warn(
                f"scenario {self.label!r}: true toxicity is not non-decreasing in dose",
                stacklevel=2,
            )

    def params(self, variant: str) -> DesignParams:
        return DesignParams(
            p_t=self.p_t,
            eps1=self.eps1,
            eps2=self.eps2,
            xi=self.xi,
            variant=variant,
            max_n=self.max_n,
            cohort_size=self.cohort_size,
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "p_T": self.p_t,
            "true_tox": list(self.true_tox),
            "eps1": self.eps1,
            "eps2": self.eps2,
            "xi": self.xi,
            "cohort_size": self.cohort_size,
            "max_n": self.max_n,
        }

    @classmethod
    def from_json(cls, record: dict) -> "Scenario":
        try:
            return cls(
                label=str(record["label"]),
                p_t=float(record["p_T"]),
                true_tox=tuple(float(p) for p in record["true_tox"]),
                eps1=float(record.get("eps1", 0.05)),
                eps2=float(record.get("eps2", 0.05)),
                xi=float(record.get("xi", 0.95)),
                cohort_size=int(record.get("cohort_size", 3)),
                max_n=int(record.get("max_n", 30)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed scenario record {record!r}: {exc}") from exc


@dataclass(frozen=True)
class SimConfig:
    n_trials: int
    seed: int = 0
    designs: tuple[str, ...] = (VARIANT_MTPI, VARIANT_MTPI2)
    cohort_size: int | None = None  # per-scenario value unless overridden
    max_n: int | None = None
    n_workers: int = 1

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        for d in self.designs:
            if d not in (VARIANT_MTPI, VARIANT_MTPI2):
                raise ValueError(f"unknown design {d!r}")


@dataclass(frozen=True)
class TrialResult:
    selected_dose: int | None
    per_dose_n: tuple[int, ...]
    status: str
    total_enrolled: int
    dose_path: tuple[tuple[int, int, int, str], ...]  # (dose, dlt, cohort_n, action)


@dataclass(frozen=True)
class OCReport:
    """Operating characteristics of one design on one scenario."""

    scenario: str
    design: str
    p_t: float
    true_mtd: int | None
    n_trials: int
    seed: int
    selection_freq: tuple[float, ...]
    none_rate: float
    allocation: tuple[float, ...]
    reliability: float
    safety: float
    stop_tox_rate: float
    mean_sample_size: float

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "design": self.design,
            "p_T": self.p_t,
            "true_mtd": self.true_mtd,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "selection_freq": list(self.selection_freq),
            "none_rate": self.none_rate,
            "allocation": list(self.allocation),
            "reliability": self.reliability,
            "safety": self.safety,
            "stop_tox_rate": self.stop_tox_rate,
            "mean_sample_size": self.mean_sample_size,
        }

    @classmethod
    def from_json(cls, record: dict) -> "OCReport":
        return cls(
            scenario=record["scenario"],
            design=record["design"],
            p_t=record["p_T"],
            true_mtd=record["true_mtd"],
            n_trials=record["n_trials"],
            seed=record["seed"],
            selection_freq=tuple(record["selection_freq"]),
            none_rate=record["none_rate"],
            allocation=tuple(record["allocation"]),
            reliability=record["reliability"],
            safety=record["safety"],
            stop_tox_rate=record["stop_tox_rate"],
            mean_sample_size=record["mean_sample_size"],
        )


def true_mtd(scenario: Scenario) -> int | None:
    """Dose whose true toxicity is closest to p_T among acceptable doses.

    A dose is acceptable when its true toxicity does not exceed p_T + eps2;
    if no dose qualifies there is no true MTD.  Ties go to the higher dose
    below target, the lower dose above (mirroring the conduct tie rules).
    This is this module's convention: reports state it in their headers.
    """
    acceptable = [
        (dose, tox)
        for dose, tox in enumerate(scenario.true_tox, start=1)
        if tox <= scenario.p_t + scenario.eps2 + 1e-12
    ]
    if not acceptable:
        return None
    best = min(abs(tox - scenario.p_t) for _, tox in acceptable)
    tied = [(dose, tox) for dose, tox in acceptable if abs(tox - scenario.p_t) <= best + 1e-12]
    below = [dose for dose, tox in tied if tox <= scenario.p_t]
    return max(below) if below else min(dose for dose, _ in tied)


TRUE_MTD_CONVENTION = (
    "true MTD = dose with true toxicity closest to p_T among doses with "
    "toxicity <= p_T + eps2; none when even the lowest dose exceeds that bound"
)


def _trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, trial_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def simulate_trial(
    scenario: Scenario, params: DesignParams, trial_index: int, seed: int
) -> TrialResult:
    """Run one full trial against Bernoulli toxicity draws."""
    rng = _trial_rng(seed, trial_index)
    state = new_trial(params, len(scenario.true_tox))
    path: list[tuple[int, int, int, str]] = []
    while state.status == STATUS_ACTIVE:
        cohort_n = min(params.cohort_size, params.max_n - state.total_enrolled)
        dose = state.current_dose
        dlt = int(rng.binomial(cohort_n, scenario.true_tox[dose - 1]))
        decision = step(state, dlt, cohort_n)
        path.append((dose, dlt, cohort_n, decision.action))
        state = decision.state
    mtd = select_mtd(state)
    return TrialResult(
        selected_dose=mtd.selected_dose,
        per_dose_n=tuple(d.n for d in state.doses),
        status=state.status,
        total_enrolled=state.total_enrolled,
        dose_path=tuple(path),
    )


def _aggregate(
    scenario: Scenario, design: str, results: list[TrialResult], config: SimConfig
) -> OCReport:
    n_doses = len(scenario.true_tox)
    mtd = true_mtd(scenario)
    n = len(results)
    sel_counts = [0] * n_doses
    none_count = 0
    alloc_patients = [0] * n_doses
    total_patients = 0
    reliable = 0
    safety_sum = 0.0
    stop_tox = 0
    sample_sum = 0
    for r in results:  # fixed trial-index order: aggregation is deterministic
        if r.selected_dose is None:
            none_count += 1
        else:
            sel_counts[r.selected_dose - 1] += 1
        if r.selected_dose == mtd:
            reliable += 1
        for i, nd in enumerate(r.per_dose_n):
            alloc_patients[i] += nd
        total_patients += r.total_enrolled
        if mtd is not None:
            at_or_below = sum(r.per_dose_n[: mtd])
            safety_sum += at_or_below / r.total_enrolled
        if r.status == STATUS_STOPPED_TOXICITY:
            stop_tox += 1
        sample_sum += r.total_enrolled
    return OCReport(
        scenario=scenario.label,
        design=design,
        p_t=scenario.p_t,
        true_mtd=mtd,
        n_trials=n,
        seed=config.seed,
        selection_freq=tuple(c / n for c in sel_counts),
        none_rate=none_count / n,
        allocation=tuple(c / total_patients for c in alloc_patients),
        reliability=reliable / n,
        safety=safety_sum / n,
        stop_tox_rate=stop_tox / n,
        mean_sample_size=sample_sum / n,
    )


def run_study(scenarios: list[Scenario], config: SimConfig) -> list[OCReport]:
    """Simulate every scenario under every requested design.

    Output is a pure function of (scenarios, config); n_workers only changes
    how the per-trial work is scheduled, never the report.
    """
    reports: list[OCReport] = []
    for scenario in scenarios:
        if config.cohort_size is not None or config.max_n is not None:
            scenario = replace(
                scenario,
                cohort_size=config.cohort_size or scenario.cohort_size,
                max_n=config.max_n or scenario.max_n,
            )
        for design in config.designs:
            params = scenario.params(design)
            indices = range(config.n_trials)
            if config.n_workers > 1:
                with ThreadPoolExecutor(max_workers=config.n_workers) as pool:
                    results = list(
                        pool.map(lambda i: simulate_trial(scenario, params, i, config.seed), indices)
                    )
            else:
                results = [simulate_trial(scenario, params, i, config.seed) for i in indices]
            reports.append(_aggregate(scenario, design, results, config))
    return reports


@dataclass(frozen=True)
class ComparisonRow:
    """Per-scenario paired difference (design A minus design B)."""

    scenario: str
    p_t: float
    design_a: str
    design_b: str
    reliability_delta: float
    safety_delta: float

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "p_T": self.p_t,
            "design_a": self.design_a,
            "design_b": self.design_b,
            "reliability_delta": self.reliability_delta,
            "safety_delta": self.safety_delta,
        }


@dataclass(frozen=True)
class Comparison:
    rows: tuple[ComparisonRow, ...]
    summary: dict[str, dict[str, float]]

    def to_json(self) -> dict:
        return {"rows": [r.to_json() for r in self.rows], "summary": self.summary}


def _quantile_summary(deltas: list[float]) -> dict[str, float]:
    arr = np.asarray(deltas, dtype=float)
    q = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {
        "mean": float(arr.mean()),
        "min": float(q[0]),
        "q1": float(q[1]),
        "median": float(q[2]),
        "q3": float(q[3]),
        "max": float(q[4]),
    }


def compare_designs(reports_a: list[OCReport], reports_b: list[OCReport]) -> Comparison:
    """Pairwise deltas (A minus B) per scenario plus boxplot summary stats."""
    by_scenario_b = {r.scenario: r for r in reports_b}
    if set(r.scenario for r in reports_a) != set(by_scenario_b):
        raise ValueError("reports cover different scenario sets")
    rows = []
    for ra in reports_a:
        rb = by_scenario_b[ra.scenario]
        if (ra.n_trials, ra.seed, ra.p_t) != (rb.n_trials, rb.seed, rb.p_t):
            raise ValueError(f"scenario {ra.scenario!r}: mismatched study configuration")
        rows.append(
            ComparisonRow(
                scenario=ra.scenario,
                p_t=ra.p_t,
                design_a=ra.design,
                design_b=rb.design,
                reliability_delta=ra.reliability - rb.reliability,
                safety_delta=ra.safety - rb.safety,
            )
        )
    summary = {
        "reliability_delta": _quantile_summary([r.reliability_delta for r in rows]),
        "safety_delta": _quantile_summary([r.safety_delta for r in rows]),
    }
    return Comparison(tuple(rows), summary)


def load_scenarios(path: str) -> list[Scenario]:
    """Read a scenario file: a JSON array of scenario records."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("scenario file must contain a JSON array")
    return [Scenario.from_json(rec) for rec in data]


def default_suite() -> list[Scenario]:
    """The packaged 10-scenario suite spanning p_T in {0.1, 0.2, 0.3}."""
    text = resources.files("mtpi2.data").joinpath("default_suite.json").read_text()
    return [Scenario.from_json(rec) for rec in json.loads(text)]
