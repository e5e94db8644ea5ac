"""Candidate-model interval sets for the mTPI and mTPI-2 designs.

mTPI uses three intervals: under-dosing, the equivalence interval (EI)
around the target, and over-dosing.  mTPI-2 tiles the flanks of the EI
with intervals of equal length delta = eps1 + eps2 so no candidate model
is favored merely for being short.  Boundary pieces shorter than delta
can be kept ("include") or dropped from the candidate set ("exclude",
the default, which is what published decision-table Bayes factors use).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

_EDGE_TOL = 1e-9  # slack for "bound lands on 0/1" and "length equals delta"

ACTION_ESCALATE = "E"
ACTION_STAY = "S"
ACTION_DEESCALATE = "D"
ACTION_UNACCEPTABLE = "U"  # de-escalate and exclude; produced by the safety overlay only

VARIANT_MTPI = "mtpi"
VARIANT_MTPI2 = "mtpi2"


@dataclass(frozen=True)
class DesignParams:
    """The full contract a design computation reads.

    p_T is the target toxicity probability; (p_T - eps1, p_T + eps2) is the
    equivalence interval; xi is the exclusion/stopping threshold; max_n the
    maximum sample size; start_dose is 1-based.
    """

    p_t: float
    eps1: float = 0.05
    eps2: float = 0.05
    xi: float = 0.95
    variant: str = VARIANT_MTPI2
    leftover_policy: str = "exclude"
    max_n: int = 12
    cohort_size: int = 3
    start_dose: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.p_t < 1.0:
            raise ValueError(f"p_T={self.p_t} outside (0, 1)")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("eps1 and eps2 must be positive")
        if self.p_t - self.eps1 <= 0:
            raise ValueError("need p_T - eps1 > 0")
        if self.p_t + self.eps2 >= 1:
            raise ValueError("need p_T + eps2 < 1")
        if not 0.5 < self.xi < 1.0:
            raise ValueError(f"xi={self.xi} outside (0.5, 1)")
        if self.variant not in (VARIANT_MTPI, VARIANT_MTPI2):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.leftover_policy not in ("exclude", "include"):
            raise ValueError(f"unknown leftover_policy {self.leftover_policy!r}")
        if self.max_n < 1:
            raise ValueError("max_n must be >= 1")
        if self.cohort_size < 1:
            raise ValueError("cohort_size must be >= 1")
        if self.start_dose < 1:
            raise ValueError("start_dose must be >= 1")

    @property
    def delta(self) -> float:
        return self.eps1 + self.eps2

    def with_variant(self, variant: str) -> "DesignParams":
        return replace(self, variant=variant)


@dataclass(frozen=True)
class Interval:
    """One candidate model: (lo, hi) with a signed tier index.

    Tier 0 is the equivalence interval; -k is the k-th interval below it,
    +k the k-th above.  The dosing action is determined by the tier sign.
    """

    lo: float
    hi: float
    tier: int
    nominal_length: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def action(self) -> str:
        if self.tier == 0:
            return ACTION_STAY
        return ACTION_ESCALATE if self.tier < 0 else ACTION_DEESCALATE

    @property
    def actual_length(self) -> float:
        return self.hi - self.lo

    @property
    def is_leftover(self) -> bool:
        """True for a boundary piece shorter than the nominal delta."""
        return self.actual_length < self.nominal_length - _EDGE_TOL


@dataclass(frozen=True)
class IntervalPartition:
    """Ordered, disjoint candidate intervals plus the params that built them."""

    intervals: tuple[Interval, ...]
    params: DesignParams

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def delta(self) -> float:
        return self.params.delta

    @property
    def equivalence_interval(self) -> Interval:
        return next(iv for iv in self.intervals if iv.tier == 0)

    def by_tier(self, tier: int) -> Interval:
        return next(iv for iv in self.intervals if iv.tier == tier)

    def to_json(self) -> dict:
        return {
            "intervals": [
                {"lo": iv.lo, "hi": iv.hi, "tier": iv.tier, "action": iv.action}
                for iv in self.intervals
            ],
            "delta": self.delta,
        }


def mtpi_partition(params: DesignParams) -> IntervalPartition:
    """The three-interval mTPI partition of (0, 1)."""
    p_t, e1, e2 = params.p_t, params.eps1, params.eps2
    intervals = (
        Interval(0.0, p_t - e1, -1, params.delta),
        Interval(p_t - e1, p_t + e2, 0, params.delta),
        Interval(p_t + e2, 1.0, 1, params.delta),
    )
    return IntervalPartition(intervals, params)


def _tile_flank(start: float, end: float, delta: float, sign: int) -> list[Interval]:
    """Tile [lo_limit, start) or (start, hi_limit] with delta-length pieces.

    sign=-1 walks down from the EI's lower bound toward 0, sign=+1 walks up
    from its upper bound toward 1.  The last piece absorbs the remainder.
    """
    span = abs(end - start)
    full = math.floor(span / delta + _EDGE_TOL)
    pieces: list[Interval] = []
    for k in range(1, full + 1):
        near = start + sign * (k - 1) * delta
        far = start + sign * k * delta
        if abs(far - end) < _EDGE_TOL:
            far = end
        lo, hi = (far, near) if sign < 0 else (near, far)
        pieces.append(Interval(lo, hi, sign * k, delta))
    remainder = span - full * delta
    if remainder > _EDGE_TOL:
        near = start + sign * full * delta
        lo, hi = (end, near) if sign < 0 else (near, end)
        pieces.append(Interval(lo, hi, sign * (full + 1), delta))
    return pieces


def mtpi2_partition(params: DesignParams) -> IntervalPartition:
    """Equal-length mTPI-2 grid around the equivalence interval.

    Under the exclude policy, sub-delta boundary pieces are dropped from
    the candidate set -- unless a piece is the only interval on its flank
    (e.g. the lone under-dosing interval when p_T - eps1 < delta), since an
    empty flank would make its action unreachable.
    """
    p_t, e1, e2, delta = params.p_t, params.eps1, params.eps2, params.delta
    ei = Interval(p_t - e1, p_t + e2, 0, delta)
    below = _tile_flank(p_t - e1, 0.0, delta, -1)
    above = _tile_flank(p_t + e2, 1.0, delta, +1)
    if params.leftover_policy == "exclude":
        below = [iv for iv in below if not iv.is_leftover] or below[-1:]
        above = [iv for iv in above if not iv.is_leftover] or above[-1:]
    intervals = tuple(sorted(below + [ei] + above, key=lambda iv: iv.lo))
    return IntervalPartition(intervals, params)


@lru_cache(maxsize=None)
def build_partition(params: DesignParams) -> IntervalPartition:
    """Partition for params.variant; cached since params are immutable."""
    if params.variant == VARIANT_MTPI:
        return mtpi_partition(params)
    return mtpi2_partition(params)


def loss_matrix(partition: IntervalPartition) -> np.ndarray:
    """0-1 loss over interval selection: zero iff the chosen model is true."""
    k = len(partition.intervals)
    return np.ones((k, k), dtype=int) - np.eye(k, dtype=int)
