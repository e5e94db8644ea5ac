"""Interval partition construction for both designs."""

import math

import numpy as np
import pytest

from mtpi2.partition import (
    DesignParams,
    build_partition,
    loss_matrix,
    mtpi2_partition,
    mtpi_partition,
)


def bounds(partition):
    return [(round(iv.lo, 10), round(iv.hi, 10)) for iv in partition]


class TestDesignParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p_t": 0.0},
            {"p_t": 1.2},
            {"p_t": 0.05, "eps1": 0.05},  # p_T - eps1 = 0
            {"p_t": 0.97, "eps2": 0.05},  # p_T + eps2 >= 1
            {"p_t": 0.3, "eps1": -0.01},
            {"p_t": 0.3, "xi": 0.4},
            {"p_t": 0.3, "xi": 1.0},
            {"p_t": 0.3, "variant": "crm"},
            {"p_t": 0.3, "leftover_policy": "trim"},
            {"p_t": 0.3, "max_n": 0},
            {"p_t": 0.3, "cohort_size": 0},
        ],
    )
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            DesignParams(**kwargs)

    def test_delta(self):
        assert DesignParams(p_t=0.3, eps1=0.03, eps2=0.07).delta == pytest.approx(0.1)


class TestMtpiPartition:
    def test_running_example(self):
        part = mtpi_partition(DesignParams(p_t=0.3))
        assert bounds(part) == [(0.0, 0.25), (0.25, 0.35), (0.35, 1.0)]
        assert [iv.action for iv in part] == ["E", "S", "D"]

    def test_low_target(self):
        part = mtpi_partition(DesignParams(p_t=0.1))
        assert bounds(part) == [(0.0, 0.05), (0.05, 0.15), (0.15, 1.0)]

    def test_lengths_sum_to_one(self):
        part = mtpi_partition(DesignParams(p_t=0.22, eps1=0.04, eps2=0.06))
        assert sum(iv.actual_length for iv in part) == pytest.approx(1.0, abs=1e-12)


class TestMtpi2Partition:
    def test_include_matches_published_listing(self):
        part = mtpi2_partition(DesignParams(p_t=0.3, leftover_policy="include"))
        assert bounds(part) == [
            (0.0, 0.05),
            (0.05, 0.15),
            (0.15, 0.25),
            (0.25, 0.35),
            (0.35, 0.45),
            (0.45, 0.55),
            (0.55, 0.65),
            (0.65, 0.75),
            (0.75, 0.85),
            (0.85, 0.95),
            (0.95, 1.0),
        ]
        tiers = [iv.tier for iv in part]
        assert tiers == [-3, -2, -1, 0, 1, 2, 3, 4, 5, 6, 7]

    def test_exclude_drops_sub_delta_boundary_pieces(self):
        part = mtpi2_partition(DesignParams(p_t=0.3))
        assert bounds(part)[0] == (0.05, 0.15)
        assert bounds(part)[-1] == (0.85, 0.95)
        assert len(part) == 9

    def test_exclude_keeps_lone_flank_piece(self):
        # p_T = 0.1: the only under-dosing interval is the sub-delta (0, 0.05);
        # dropping it would make escalation unreachable
        part = mtpi2_partition(DesignParams(p_t=0.1))
        assert bounds(part)[0] == (0.0, 0.05)
        assert part.intervals[0].action == "E"

    def test_exact_flank_division_has_no_leftovers(self):
        part = mtpi2_partition(DesignParams(p_t=0.5, eps1=0.25, eps2=0.25))
        assert bounds(part) == [(0.0, 0.25), (0.25, 0.75), (0.75, 1.0)]
        assert [iv.action for iv in part] == ["E", "S", "D"]
        include = mtpi2_partition(
            DesignParams(p_t=0.5, eps1=0.25, eps2=0.25, leftover_policy="include")
        )
        assert bounds(include) == bounds(part)

    @pytest.mark.parametrize("p_t", [0.1, 0.16, 0.2, 0.25, 0.3])
    @pytest.mark.parametrize("eps", [(0.05, 0.05), (0.03, 0.05), (0.04, 0.02)])
    def test_include_covers_unit_interval(self, p_t, eps):
        part = mtpi2_partition(
            DesignParams(p_t=p_t, eps1=eps[0], eps2=eps[1], leftover_policy="include")
        )
        ivs = sorted(part, key=lambda iv: iv.lo)
        assert ivs[0].lo == pytest.approx(0.0, abs=1e-12)
        assert ivs[-1].hi == pytest.approx(1.0, abs=1e-12)
        for a, b in zip(ivs, ivs[1:]):
            assert a.hi == pytest.approx(b.lo, abs=1e-12)

    @pytest.mark.parametrize("p_t", [0.1, 0.16, 0.2, 0.25, 0.3])
    def test_non_leftover_lengths_equal_delta(self, p_t):
        params = DesignParams(p_t=p_t, leftover_policy="include")
        for iv in mtpi2_partition(params):
            if not iv.is_leftover:
                assert iv.actual_length == pytest.approx(params.delta, abs=1e-12)

    @pytest.mark.parametrize(
        "p_t,eps1,eps2", [(0.3, 0.05, 0.05), (0.1, 0.05, 0.05), (0.25, 0.04, 0.06), (0.16, 0.03, 0.02)]
    )
    def test_count_formula(self, p_t, eps1, eps2):
        params = DesignParams(p_t=p_t, eps1=eps1, eps2=eps2, leftover_policy="include")
        delta = params.delta
        k1 = math.ceil((p_t - eps1) / delta - 1e-9) - 1
        k2 = math.ceil((1 - p_t - eps2) / delta - 1e-9) - 1
        assert len(mtpi2_partition(params)) == k1 + k2 + 3

    def test_equivalence_interval_shared_with_mtpi(self):
        params = DesignParams(p_t=0.3)
        ei2 = mtpi2_partition(params).equivalence_interval
        ei1 = mtpi_partition(params).equivalence_interval
        assert (ei1.lo, ei1.hi) == (ei2.lo, ei2.hi)
        assert ei1.tier == ei2.tier == 0

    def test_tier_sign_determines_action(self):
        for iv in mtpi2_partition(DesignParams(p_t=0.3, leftover_policy="include")):
            expected = "S" if iv.tier == 0 else ("E" if iv.tier < 0 else "D")
            assert iv.action == expected

    def test_serialization_schema(self):
        doc = mtpi2_partition(DesignParams(p_t=0.3)).to_json()
        assert doc["delta"] == pytest.approx(0.1)
        assert {"lo", "hi", "tier", "action"} == set(doc["intervals"][0])
        assert [iv["action"] for iv in doc["intervals"]] == ["E", "E", "S"] + ["D"] * 6


class TestLossMatrix:
    def test_mtpi_shape(self):
        m = loss_matrix(mtpi_partition(DesignParams(p_t=0.3)))
        assert m.shape == (3, 3)
        assert np.array_equal(m, np.ones((3, 3), dtype=int) - np.eye(3, dtype=int))

    def test_mtpi2_include_is_eleven_square(self):
        m = loss_matrix(mtpi2_partition(DesignParams(p_t=0.3, leftover_policy="include")))
        assert m.shape == (11, 11)

    def test_zero_diagonal_ones_elsewhere(self):
        m = loss_matrix(mtpi2_partition(DesignParams(p_t=0.16)))
        assert m.trace() == 0
        assert np.all(m + np.eye(m.shape[0], dtype=int) == 1)


class TestBuildPartition:
    def test_dispatch_by_variant(self):
        p = DesignParams(p_t=0.3, variant="mtpi")
        assert len(build_partition(p)) == 3
        assert len(build_partition(p.with_variant("mtpi2"))) == 9

    def test_cached_identity(self):
        p = DesignParams(p_t=0.3)
        assert build_partition(p) is build_partition(DesignParams(p_t=0.3))
