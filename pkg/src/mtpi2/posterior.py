"""Exact beta-binomial posterior math for dose-finding.

With a Beta(1, 1) prior and integer DLT counts, every posterior is a
Beta(x + 1, n - x + 1) with integer shapes.  That lets us evaluate the
regularized incomplete beta function exactly through the identity

    I_t(a, b) = Pr(Binomial(a + b - 1, t) >= a)

instead of a continued-fraction special function.  All terms are
accumulated in log space so the sum stays stable for n in the hundreds.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class BetaParams(NamedTuple):
    """Integer-shape beta distribution parameters, a >= 1 and b >= 1."""

    a: int
    b: int


class DoseData(NamedTuple):
    """Observed (DLT count, patients treated) at one dose, 0 <= x <= n."""

    x: int
    n: int


def _validate_dose_data(d: DoseData) -> None:
    if d.x < 0 or d.n < 0 or d.x > d.n:
        raise ValueError(f"invalid dose data (x={d.x}, n={d.n}): need 0 <= x <= n")


def reg_inc_beta(t: float, p: BetaParams) -> float:
    """Regularized incomplete beta I_t(a, b), the Beta(a, b) CDF at t.

    Exact (to float rounding) for integer shapes via the binomial tail
    Pr(Bin(a+b-1, t) >= a); each term is built in log space and the tail
    is summed with ``math.fsum``.
    """
    a, b = p
    if a < 1 or b < 1:
        raise ValueError(f"beta shapes must be positive integers, got ({a}, {b})")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    n = a + b - 1
    log_t = math.log(t)
    log_q = math.log1p(-t)
    log_n_fact = math.lgamma(n + 1)
    log_terms = [
        log_n_fact - math.lgamma(k + 1) - math.lgamma(n - k + 1) + k * log_t + (n - k) * log_q
        for k in range(a, n + 1)
    ]
    peak = max(log_terms)
    if peak == -math.inf:
        return 0.0
    total = peak + math.log(math.fsum(math.exp(lt - peak) for lt in log_terms))
    return min(1.0, math.exp(total))


def posterior(d: DoseData) -> BetaParams:
    """Posterior Beta(x + 1, n - x + 1) under the Beta(1, 1) prior."""
    _validate_dose_data(d)
    return BetaParams(d.x + 1, d.n - d.x + 1)


def interval_mass(d: DoseData, lo: float, hi: float) -> float:
    """Posterior probability that the toxicity rate lies in (lo, hi)."""
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"need 0 <= lo < hi <= 1, got ({lo}, {hi})")
    p = posterior(d)
    return max(0.0, reg_inc_beta(hi, p) - reg_inc_beta(lo, p))


def posterior_mean(d: DoseData) -> float:
    """Posterior mean (x + 1) / (n + 2)."""
    _validate_dose_data(d)
    return (d.x + 1) / (d.n + 2)


def posterior_variance(d: DoseData) -> float:
    """Posterior variance (x + 1)(n - x + 1) / ((n + 2)^2 (n + 3))."""
    _validate_dose_data(d)
    a, b = d.x + 1, d.n - d.x + 1
    return a * b / ((d.n + 2) ** 2 * (d.n + 3))


def prob_over_target(d: DoseData, p_t: float) -> float:
    """Pr(p > p_T | x, n), the over-target mass driving the safety rule."""
    if not 0.0 < p_t < 1.0:
        raise ValueError(f"target p_T={p_t} outside (0, 1)")
    return 1.0 - reg_inc_beta(p_t, posterior(d))
