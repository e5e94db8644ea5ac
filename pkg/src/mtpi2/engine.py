"""Optimal dose-finding decisions, Bayes factors, and decision tables.

The decision at (x, n) is the action of the interval with the largest
unit probability mass (UPM = posterior interval mass / interval length),
which under equal model priors and the truncated-uniform within-model
prior is the Bayes rule for 0-1 loss over interval selection.  A safety
overlay replaces the decision with U (de-escalate and exclude the dose)
when Pr(p > p_T | x, n) exceeds xi: mTPI-2 checks this for every cell,
mTPI only when the base decision is already D.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .partition import (
    ACTION_DEESCALATE,
    ACTION_ESCALATE,
    ACTION_STAY,
    ACTION_UNACCEPTABLE,
    VARIANT_MTPI,
    VARIANT_MTPI2,
    DesignParams,
    Interval,
    IntervalPartition,
    build_partition,
)
from .posterior import DoseData, interval_mass, prob_over_target

# Severity order used for row-monotonicity checks and tie-breaking.
SEVERITY = {ACTION_ESCALATE: 0, ACTION_STAY: 1, ACTION_DEESCALATE: 2, ACTION_UNACCEPTABLE: 3}

# UPMs this close (relatively) are treated as tied.  Analytically exact ties
# do occur on the integer grid (e.g. x/n = 1/2 with p_T = 0.25 makes the stay
# and de-escalate UPMs equal) and float rounding would otherwise decide them
# arbitrarily; every observed non-tie gap is wider than 1e-4 relative.
UPM_TIE_REL_TOL = 1e-9


def upm(interval: Interval, d: DoseData) -> float:
    """Unit probability mass: posterior mass of the interval per unit length."""
    return interval_mass(d, interval.lo, interval.hi) / interval.actual_length


def _tie_key(interval: Interval) -> tuple[int, int]:
    # Exact UPM ties break toward safety: D over S over E, then the more
    # extreme tier within a class.
    return (SEVERITY[interval.action], abs(interval.tier))


def optimal_interval(partition: IntervalPartition, d: DoseData) -> Interval:
    """The argmax-UPM interval (the winning candidate model).

    Ties within UPM_TIE_REL_TOL resolve toward safety via _tie_key.
    """
    if d.n < 1:
        raise ValueError("no data at this dose yet (n = 0)")
    upms = [(upm(iv, d), iv) for iv in partition]
    best = max(u for u, _ in upms)
    tied = [iv for u, iv in upms if u >= best * (1.0 - UPM_TIE_REL_TOL)]
    return max(tied, key=_tie_key)


def posterior_model_probs(partition: IntervalPartition, d: DoseData) -> np.ndarray:
    """Posterior probability of each candidate interval, normalized to 1.

    Proportional to the per-interval UPM under equal model priors.
    """
    raw = np.array([upm(iv, d) for iv in partition], dtype=float)
    return raw / raw.sum()


def apply_safety_rule(base: str, d: DoseData, params: DesignParams) -> str:
    """Replace base with U when Pr(p > p_T) strictly exceeds xi."""
    if d.n < 1:
        raise ValueError("safety rule needs at least one treated patient")
    if prob_over_target(d, params.p_t) > params.xi:
        return ACTION_UNACCEPTABLE
    return base


def decide_mtpi(d: DoseData, params: DesignParams) -> str:
    """mTPI decision: argmax UPM over the three intervals; safety checked
    only when the winning action is D."""
    part = build_partition(params.with_variant(VARIANT_MTPI))
    base = optimal_interval(part, d).action
    if base == ACTION_DEESCALATE:
        return apply_safety_rule(base, d, params)
    return base


def decide_mtpi2(d: DoseData, params: DesignParams) -> str:
    """mTPI-2 decision: argmax UPM over the equal-length grid; the safety
    rule is evaluated unconditionally."""
    part = build_partition(params.with_variant(VARIANT_MTPI2))
    base = optimal_interval(part, d).action
    return apply_safety_rule(base, d, params)


def decide(d: DoseData, params: DesignParams) -> str:
    return decide_mtpi(d, params) if params.variant == VARIANT_MTPI else decide_mtpi2(d, params)


def bayes_factor(d: DoseData, params: DesignParams) -> float:
    """Evidence ratio backing the winning decision.

    Winning interval off the EI: UPM(winner) / UPM(EI).  EI itself winning:
    UPM(EI) / UPM(best challenger).  Greater than 1 by construction; values
    near 1 flag weak evidence.  Undefined (raises) for U cells -- callers
    report those as absent.
    """
    if decide(d, params) == ACTION_UNACCEPTABLE:
        raise ValueError("Bayes factor is not reported for U cells")
    part = build_partition(params)
    winner = optimal_interval(part, d)
    upm_ei = upm(part.equivalence_interval, d)
    if winner.tier != 0:
        return upm(winner, d) / upm_ei
    challenger = max(upm(iv, d) for iv in part if iv.tier != 0)
    return upm_ei / challenger


def posterior_expected_loss(
    action_index: int,
    partition: IntervalPartition,
    d: DoseData,
    loss: np.ndarray,
) -> float:
    """Expected 0-1 loss of selecting interval action_index: sum_j L[i,j] Pr(M_j)."""
    probs = posterior_model_probs(partition, d)
    return float(loss[action_index] @ probs)


@dataclass(frozen=True)
class DecisionCell:
    """Precomputed decision for one (x, n) pair."""

    x: int
    n: int
    decision: str
    bayes_factor: float | None  # absent exactly when decision is U
    winning_tier: int
    posterior_model_probs: tuple[float, ...]

    @property
    def base_action(self) -> str:
        """The dosing action of the winning interval, before the safety overlay."""
        if self.winning_tier == 0:
            return ACTION_STAY
        return ACTION_ESCALATE if self.winning_tier < 0 else ACTION_DEESCALATE

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "n": self.n,
            "decision": self.decision,
            "bayes_factor": self.bayes_factor,
            "winning_tier": self.winning_tier,
            "posterior_model_probs": list(self.posterior_model_probs),
        }


@dataclass(frozen=True)
class DecisionTable:
    """All feasible cells 0 <= x <= n <= max_n for one design variant."""

    params: DesignParams
    cells: dict[tuple[int, int], DecisionCell]

    def cell(self, x: int, n: int) -> DecisionCell:
        return self.cells[(x, n)]

    def to_json(self) -> dict:
        part = build_partition(self.params)
        return {
            "variant": self.params.variant,
            "p_T": self.params.p_t,
            "eps1": self.params.eps1,
            "eps2": self.params.eps2,
            "xi": self.params.xi,
            "max_n": self.params.max_n,
            "leftover_policy": self.params.leftover_policy,
            "partition": part.to_json(),
            "cells": [
                self.cells[key].to_json() for key in sorted(self.cells)
            ],
        }


@lru_cache(maxsize=None)
def _cell(x: int, n: int, params: DesignParams) -> DecisionCell:
    d = DoseData(x, n)
    part = build_partition(params)
    winner = optimal_interval(part, d)
    decision = decide(d, params)
    bf = None if decision == ACTION_UNACCEPTABLE else bayes_factor(d, params)
    probs = tuple(posterior_model_probs(part, d))
    return DecisionCell(x, n, decision, bf, winner.tier, probs)


def decision_cell(d: DoseData, params: DesignParams) -> DecisionCell:
    return _cell(d.x, d.n, params)


def decision_table(params: DesignParams) -> DecisionTable:
    """Enumerate every feasible (x, n) up to max_n."""
    cells = {
        (x, n): decision_cell(DoseData(x, n), params)
        for n in range(1, params.max_n + 1)
        for x in range(n + 1)
    }
    return DecisionTable(params, cells)


def decision_card(d: DoseData, params: DesignParams) -> dict:
    """Everything a caller needs to act on one (x, n) observation.

    The same dict backs the CLI's ``next`` output and the service's
    decision card, so the two surfaces always agree byte for byte.
    """
    cell = decision_cell(d, params)
    part = build_partition(params)
    return {
        "design": params.variant,
        "p_T": params.p_t,
        "eps1": params.eps1,
        "eps2": params.eps2,
        "xi": params.xi,
        "x": d.x,
        "n": d.n,
        "decision": cell.decision,
        "bayes_factor": cell.bayes_factor,
        "prob_over_target": prob_over_target(d, params.p_t),
        "intervals": [
            {"lo": iv.lo, "hi": iv.hi, "tier": iv.tier, "action": iv.action, "prob": p}
            for iv, p in zip(part, cell.posterior_model_probs)
        ],
    }


@dataclass(frozen=True)
class DiffEntry:
    """One cell where the two variants disagree."""

    x: int
    n: int
    from_decision: str
    to_decision: str
    empirical_gap: float  # x/n - p_T

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "n": self.n,
            "from": self.from_decision,
            "to": self.to_decision,
            "empirical_gap": self.empirical_gap,
        }


def table_diff(a: DecisionTable, b: DecisionTable) -> list[DiffEntry]:
    """Cells whose decisions differ between two tables (a -> b).

    Tables must share every parameter except the design variant.
    """
    pa = a.params.with_variant(b.params.variant)
    if pa != b.params:
        raise ValueError("tables differ in more than the design variant")
    out = []
    for key in sorted(a.cells):
        ca, cb = a.cells[key], b.cells[key]
        if ca.decision != cb.decision:
            x, n = key
            out.append(DiffEntry(x, n, ca.decision, cb.decision, x / n - a.params.p_t))
    return out
