"""Monte Carlo operating characteristics: determinism, accounting, metrics."""

import json
import math

import pytest

from mtpi2.export import oc_report_csv, oc_report_json
from mtpi2.simulate import (
    Comparison,
    OCReport,
    Scenario,
    SimConfig,
    compare_designs,
    default_suite,
    load_scenarios,
    run_study,
    simulate_trial,
    true_mtd,
)

ZERO_TOX = Scenario("zero", 0.3, (0.0, 0.0, 0.0, 0.0), max_n=12, cohort_size=3)
ALL_TOX = Scenario("hot", 0.3, (1.0, 1.0, 1.0), max_n=12, cohort_size=3)


class TestTrueMtd:
    def test_exact_match(self):
        assert true_mtd(Scenario("s", 0.3, (0.05, 0.10, 0.30, 0.50))) == 3

    def test_all_over_toxic(self):
        assert true_mtd(Scenario("s", 0.3, (0.60, 0.70))) is None

    def test_closest_from_below(self):
        assert true_mtd(Scenario("s", 0.3, (0.10, 0.20))) == 2

    def test_tie_below_target_prefers_higher(self):
        assert true_mtd(Scenario("s", 0.3, (0.25, 0.25, 0.60))) == 2

    def test_tie_across_target_prefers_lower_of_above(self):
        # 0.25 and 0.35 are equidistant; 0.25 <= p_T wins as the higher below
        assert true_mtd(Scenario("s", 0.3, (0.25, 0.35))) == 1

    def test_boundary_of_acceptability(self):
        # exactly p_T + eps2 is still acceptable
        assert true_mtd(Scenario("s", 0.3, (0.35, 0.50))) == 1


class TestScenario:
    def test_non_monotone_warns(self):
        with pytest.warns(UserWarning, match="non-decreasing"):
            Scenario("odd", 0.3, (0.3, 0.1))

    def test_invalid_probability_rejected(self):
        with pytest.raises(ValueError):
            Scenario("bad", 0.3, (0.2, 1.4))

    def test_malformed_record_names_it(self):
        with pytest.raises(ValueError, match="malformed scenario record"):
            Scenario.from_json({"label": "x", "true_tox": [0.1]})  # p_T missing

    def test_roundtrip(self):
        sc = Scenario("rt", 0.2, (0.1, 0.2), cohort_size=2, max_n=10)
        assert Scenario.from_json(sc.to_json()) == sc


class TestSimulateTrial:
    def test_zero_toxicity_is_deterministic_escalation(self):
        params = ZERO_TOX.params("mtpi2")
        result = simulate_trial(ZERO_TOX, params, 0, seed=123)
        assert [c[0] for c in result.dose_path] == [1, 2, 3, 4]
        assert all(c[1] == 0 for c in result.dose_path)
        assert result.selected_dose == 4
        assert result.status == "completed"

    def test_all_toxic_stops_at_dose_one(self):
        params = ALL_TOX.params("mtpi2")
        result = simulate_trial(ALL_TOX, params, 0, seed=123)
        assert result.status == "stopped_toxicity"
        assert result.selected_dose is None
        assert result.per_dose_n == (3, 0, 0)

    def test_same_stream_same_result(self):
        sc = Scenario("mid", 0.3, (0.1, 0.25, 0.45, 0.6), max_n=18)
        params = sc.params("mtpi")
        a = simulate_trial(sc, params, 7, seed=99)
        b = simulate_trial(sc, params, 7, seed=99)
        assert a == b
        c = simulate_trial(sc, params, 8, seed=99)
        assert a != c  # different trial index, different stream

    def test_patient_conservation(self):
        sc = Scenario("mid", 0.3, (0.1, 0.25, 0.45), max_n=15)
        params = sc.params("mtpi2")
        for i in range(25):
            r = simulate_trial(sc, params, i, seed=4)
            assert sum(r.per_dose_n) == r.total_enrolled <= 15


class TestRunStudy:
    def test_zero_toxicity_metrics(self):
        report = run_study([ZERO_TOX], SimConfig(n_trials=100, seed=7, designs=("mtpi2",)))[0]
        assert report.reliability == 1.0
        assert report.safety == 1.0
        assert report.selection_freq == (0.0, 0.0, 0.0, 1.0)
        assert report.mean_sample_size == 12.0

    def test_all_toxic_metrics(self):
        report = run_study([ALL_TOX], SimConfig(n_trials=100, seed=7, designs=("mtpi2",)))[0]
        assert report.stop_tox_rate == 1.0
        assert report.safety == 0.0
        assert report.none_rate == 1.0
        assert report.reliability == 1.0  # none selected and true MTD is none

    def test_frequencies_sum_to_one(self):
        sc = Scenario("mid", 0.3, (0.12, 0.3, 0.5), max_n=15)
        for report in run_study([sc], SimConfig(n_trials=200, seed=3)):
            assert sum(report.selection_freq) + report.none_rate == pytest.approx(1.0, abs=1e-9)
            assert sum(report.allocation) == pytest.approx(1.0, abs=1e-9)

    def test_parallelism_does_not_change_report(self):
        sc = Scenario("mid", 0.25, (0.1, 0.2, 0.4, 0.55), max_n=18)
        serial = run_study([sc], SimConfig(n_trials=150, seed=11, n_workers=1))
        pooled = run_study([sc], SimConfig(n_trials=150, seed=11, n_workers=4))
        assert json.dumps(oc_report_json(serial)) == json.dumps(oc_report_json(pooled))

    def test_config_overrides_scenario(self):
        report = run_study(
            [ZERO_TOX], SimConfig(n_trials=10, seed=1, designs=("mtpi2",), max_n=6)
        )[0]
        assert report.mean_sample_size == 6.0

    def test_selection_frequencies_stable_across_seeds(self):
        # sanity band: independent seeds agree within 3 Monte Carlo SEs
        sc = Scenario("mid", 0.3, (0.1, 0.3, 0.5), max_n=15)
        n = 2000
        a = run_study([sc], SimConfig(n_trials=n, seed=101, designs=("mtpi2",)))[0]
        b = run_study([sc], SimConfig(n_trials=n, seed=202, designs=("mtpi2",)))[0]
        for fa, fb in zip(
            a.selection_freq + (a.none_rate,), b.selection_freq + (b.none_rate,)
        ):
            p = (fa + fb) / 2
            se = math.sqrt(max(p * (1 - p), 1e-6) / n)
            assert abs(fa - fb) <= 3 * se * math.sqrt(2)


class TestCompareDesigns:
    def _reports(self, seed=5, n=150):
        scenarios = [
            Scenario("a", 0.3, (0.1, 0.3, 0.5), max_n=15),
            Scenario("b", 0.3, (0.3, 0.5, 0.7), max_n=15),
        ]
        cfg = SimConfig(n_trials=n, seed=seed)
        reports = run_study(scenarios, cfg)
        mtpi = [r for r in reports if r.design == "mtpi"]
        mtpi2 = [r for r in reports if r.design == "mtpi2"]
        return mtpi, mtpi2

    def test_identical_designs_zero_delta(self):
        mtpi, _ = self._reports()
        cmp = compare_designs(mtpi, mtpi)
        assert all(r.reliability_delta == 0.0 and r.safety_delta == 0.0 for r in cmp.rows)

    def test_antisymmetric(self):
        mtpi, mtpi2 = self._reports()
        ab = compare_designs(mtpi2, mtpi)
        ba = compare_designs(mtpi, mtpi2)
        for x, y in zip(ab.rows, ba.rows):
            assert x.reliability_delta == pytest.approx(-y.reliability_delta, abs=1e-15)
            assert x.safety_delta == pytest.approx(-y.safety_delta, abs=1e-15)

    def test_summary_quantiles_present(self):
        mtpi, mtpi2 = self._reports()
        cmp = compare_designs(mtpi2, mtpi)
        assert set(cmp.summary) == {"reliability_delta", "safety_delta"}
        assert set(cmp.summary["safety_delta"]) == {"mean", "min", "q1", "median", "q3", "max"}

    def test_mismatched_scenarios_rejected(self):
        mtpi, mtpi2 = self._reports()
        with pytest.raises(ValueError):
            compare_designs(mtpi2, mtpi[:1])


class TestScenarioIO:
    def test_default_suite(self):
        suite = default_suite()
        assert len(suite) == 10
        assert {sc.p_t for sc in suite} == {0.1, 0.2, 0.3}
        for sc in suite:
            assert all(b >= a for a, b in zip(sc.true_tox, sc.true_tox[1:]))

    def test_load_scenarios_roundtrip(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps([s.to_json() for s in default_suite()]))
        assert load_scenarios(str(path)) == default_suite()

    def test_load_rejects_non_array(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"label": "x"}')
        with pytest.raises(ValueError, match="JSON array"):
            load_scenarios(str(path))

    def test_load_names_offending_record(self, tmp_path):
        path = tmp_path / "bad2.json"
        path.write_text('[{"label": "broken", "true_tox": [0.1]}]')
        with pytest.raises(ValueError, match="broken"):
            load_scenarios(str(path))


class TestReportExport:
    def test_csv_header_states_convention(self):
        report = run_study([ZERO_TOX], SimConfig(n_trials=5, seed=1, designs=("mtpi2",)))
        text = oc_report_csv(report)
        assert text.startswith("# true MTD")
        assert "zero,mtpi2" in text

    def test_json_shape(self):
        report = run_study([ZERO_TOX], SimConfig(n_trials=5, seed=1, designs=("mtpi2",)))
        doc = oc_report_json(report)
        assert doc["reports"][0]["reliability"] == 1.0
        assert "true_mtd" in doc["conventions"]["true_mtd"] or doc["conventions"]
